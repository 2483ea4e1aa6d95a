from fractions import Fraction

from oracles import corner_polytope_vertices


def vertex_weights(result):
    corners = result.rect.corners
    out = set()
    for law in result.vertices:
        mass = dict(law.atoms)
        out.add(tuple(mass.get(c, Fraction(0)) for c in corners))
    return out


def oracle_weights(R):
    return corner_polytope_vertices(R.x1, R.x2, R.y1, R.y2)
