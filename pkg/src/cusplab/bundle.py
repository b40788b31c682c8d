"""Hyperbolic structure of once-punctured-torus bundles.

A pseudo-Anosov word over {L, R} determines a mapping torus fibering over
the circle with once-punctured-torus fiber.  Layering one ideal tetrahedron
per letter between consecutive diagonal flips of the fiber triangulation,
then closing up through the monodromy, yields the standard ideal
triangulation of the bundle.  This module builds that triangulation, writes
Thurston's gluing equations in logarithmic form, solves them by a damped
Newton iteration, and measures the cusp: the translation lattice of the
boundary torus, the length of the fiber boundary (the longitude), and the
maximal horoball neighborhood.

Plane bookkeeping.  The fiber is R^2/Z^2 minus the lattice, triangulated by
two triangles with edge directions u, v, u + v.  The letter R flips the
u-edge and replaces u by u + v; the letter L flips the v-edge and replaces
v by u + v.  Either flip spans an ideal tetrahedron whose two bottom faces
lie in the old triangulation and whose two top faces lie in the new one.
Faces are identified with lattice triangles up to translation, and the top
of the last layer is carried onto the bottom of the first by the inverse of
the monodromy acting on the plane.
"""

import cmath
import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import (DegenerateShape, DepthUnstable, Diverged, MaxIterations,
                     NotPseudoAnosov, NotSolved, NumericalError)
from .farey import word_to_matrix

__all__ = [
    "LayeredTriangulation", "ShapeVector", "CuspCrossSection", "GluingSystem",
    "layered_triangulation", "gluing_system", "solve_shapes",
    "cusp_cross_section", "maximal_cusp",
    "tetrahedron_volume", "total_volume", "bundle_report",
]


# ---- layered triangulation ----------------------------------------------

def _add(p, q):
    return (p[0] + q[0], p[1] + q[1])


def _sub(p, q):
    return (p[0] - q[0], p[1] - q[1])


def _neg(p):
    return (-p[0], -p[1])


# The vertex order (v0, v1, v2, v3) realizes the flip quadrilateral
# (a, b, c, d), counterclockwise in the plane, as (a, c, b, d): the two
# quad diagonals are then the opposite edge pairs {0,1} (new, top) and
# {2,3} (old, bottom).  Faces are named by the omitted vertex, so faces
# 0 and 1 are the bottom pair and faces 2 and 3 are the top pair.
_FACE = {r: tuple(m for m in range(4) if m != r) for r in range(4)}

# Opposite edges carry equal dihedral parameters: index 0 is z itself on
# the diagonal pair, 1 is 1/(1-z), 2 is (z-1)/z.  The three multiply to -1
# and their principal logarithms sum to pi*i whenever Im z > 0.
_PAIR = {}
for _k, _pairs in enumerate((((0, 1), (2, 3)),
                             ((0, 2), (1, 3)),
                             ((0, 3), (1, 2)))):
    for _p in _pairs:
        _PAIR[frozenset(_p)] = _k


@dataclass(frozen=True)
class _Tet:
    """One layer: the tetrahedron spanned by a single diagonal flip."""
    letter: str
    verts: tuple  # four plane points in (v0, v1, v2, v3) order


# Walking once around the fiber puncture crosses the corners of the two
# bottom faces of the first layer in a fixed cyclic order.  Entries are
# (face, vertex) pairs of tetrahedron 0; the order depends on its letter.
_PUNCTURE_WALK = {
    "R": ((0, 3), (1, 0), (0, 2), (1, 2), (0, 1), (1, 3)),
    "L": ((1, 0), (0, 2), (1, 2), (0, 1), (1, 3), (0, 3)),
}


@dataclass(frozen=True)
class LayeredTriangulation:
    """Ideal triangulation of a once-punctured-torus bundle.

    One tetrahedron per monodromy letter.  ``gluings`` maps a face handle
    (tet, omitted vertex) to (other tet, other face, vertex bijection);
    ``degrees`` records the winding of each gluing around the fiber
    direction (+1 crossing the monodromy closure upward, -1 downward, 0
    inside the stack).  ``edge_classes`` partitions the 6n tetrahedron
    edges (tet, vertex pair) into the edges of the glued manifold, and
    ``fiber_boundary_class`` lists the face corners of tetrahedron 0 that
    a loop around the fiber puncture crosses, in cyclic order: the
    peripheral class of the fiber boundary (the longitude).
    """
    word: str
    tetrahedra: tuple
    gluings: dict
    degrees: dict
    edge_classes: tuple
    fiber_boundary_class: tuple

    @property
    def num_tetrahedra(self):
        return len(self.tetrahedra)


def layered_triangulation(word):
    """Build the layered triangulation of the bundle with monodromy ``word``.

    Raises NotPseudoAnosov for single-letter words (parabolic monodromy),
    EmptyWord for "", and ValueError on characters outside {L, R}.
    """
    mono = word_to_matrix(word)
    if not mono.is_pseudo_anosov:
        raise NotPseudoAnosov("monodromy %r is not pseudo-Anosov" % word)

    u, v = (1, 0), (0, 1)
    tets = []
    for letter in word:
        w = _add(u, v)
        if letter == "R":
            tets.append(_Tet(letter, (_neg(v), w, u, (0, 0))))
            u = w
        else:
            tets.append(_Tet(letter, (_neg(u), w, (0, 0), v)))
            v = w

    (a, b), (c, d) = mono.matrix

    def unwind(p):
        # inverse monodromy on plane vectors (q, p); carries the top of the
        # last layer back onto the bottom of the first
        return (a * p[0] - c * p[1], -b * p[0] + d * p[1])

    n = len(tets)
    gluings = {}
    degrees = {}
    for i, tet in enumerate(tets):
        j = (i + 1) % n
        wrap = (j == 0)
        bottoms = {}
        for r in (0, 1):
            pts = [tets[j].verts[m] for m in _FACE[r]]
            base = min(pts)
            key = tuple(sorted(_sub(q, base) for q in pts))
            bottoms[key] = (r, {_sub(q, base): m
                                for q, m in zip(pts, _FACE[r])})
        for r in (2, 3):
            pts = [tet.verts[m] for m in _FACE[r]]
            if wrap:
                pts = [unwind(q) for q in pts]
            base = min(pts)
            key = tuple(sorted(_sub(q, base) for q in pts))
            if key not in bottoms:
                raise NumericalError("layer %d does not stack onto layer %d"
                                     % (i, j))
            r2, where = bottoms[key]
            sigma = {m: where[_sub(q, base)]
                     for q, m in zip(pts, _FACE[r])}
            gluings[(i, r)] = (j, r2, sigma)
            gluings[(j, r2)] = (i, r, {m2: m1 for m1, m2 in sigma.items()})
            degrees[(i, r)] = 1 if wrap else 0
            degrees[(j, r2)] = -1 if wrap else 0

    for handle, (j, r2, _) in gluings.items():
        back = gluings[(j, r2)]
        if (back[0], back[1]) != handle or (j, r2) == handle:
            raise NumericalError("face gluing is not an involution")

    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for m1 in range(4):
            for m2 in range(m1 + 1, 4):
                parent[(i, (m1, m2))] = (i, (m1, m2))
    for (i, r), (j, r2, sigma) in gluings.items():
        face = _FACE[r]
        for s in range(3):
            for s2 in range(s + 1, 3):
                m1, m2 = face[s], face[s2]
                e1 = find((i, tuple(sorted((m1, m2)))))
                e2 = find((j, tuple(sorted((sigma[m1], sigma[m2])))))
                if e1 != e2:
                    parent[e1] = e2
    classes = {}
    for edge in parent:
        classes.setdefault(find(edge), []).append(edge)
    edge_classes = tuple(tuple(sorted(members))
                         for _, members in sorted(classes.items()))

    walk = tuple((0, r, m) for r, m in _PUNCTURE_WALK[word[0]])
    return LayeredTriangulation(word, tuple(tets), gluings, degrees,
                                edge_classes, walk)


# ---- shapes and gluing equations ----------------------------------------

@dataclass(frozen=True)
class ShapeVector:
    """Tetrahedron shapes, one point of the upper half plane per layer."""
    shapes: tuple

    def __post_init__(self):
        zs = tuple(complex(z) for z in self.shapes)
        if not zs:
            raise DegenerateShape("a shape vector needs at least one entry")
        for z in zs:
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise DegenerateShape("shape %r is not finite" % (z,))
            if z.imag <= 0.0:
                raise DegenerateShape("shape %r has left the upper half plane"
                                      % (z,))
            if abs(z) < 1e-14 or abs(z - 1) < 1e-14:
                raise DegenerateShape("shape %r sits on a degenerate point"
                                      % (z,))
        object.__setattr__(self, "shapes", zs)

    def __len__(self):
        return len(self.shapes)

    def __iter__(self):
        return iter(self.shapes)

    def __getitem__(self, k):
        return self.shapes[k]


def _shape_array(shapes):
    if isinstance(shapes, ShapeVector):
        return np.array(shapes.shapes, dtype=complex)
    return np.array(ShapeVector(tuple(shapes)).shapes, dtype=complex)


def _corner(z, k, m):
    p = _PAIR[frozenset((k, m))]
    if p == 0:
        return z
    if p == 1:
        return 1.0 / (1.0 - z)
    return (z - 1.0) / z


def _cyc(k):
    # cyclic order of the cusp triangle at vertex k; odd vertices reverse
    # orientation relative to even ones
    rest = tuple(m for m in range(4) if m != k)
    return rest if k % 2 == 0 else rest[::-1]


class GluingSystem:
    """Logarithmic gluing equations of a layered triangulation.

    One equation per edge class (the dihedral log-parameters around the
    class sum to 2*pi*i) plus one completeness equation: the log of the
    derivative of a fixed peripheral loop with nonzero winding around the
    fiber direction.  The edge equations carry one redundancy (their sum
    is 2*pi*i times the number of edges for any upper-half-plane shapes),
    so Newton steps go through least squares.

    Branches are fixed once and for all: every dihedral parameter of an
    upper-half-plane shape has argument in (0, pi), so the principal
    logarithm is the correct branch throughout the iteration and is never
    recomputed.
    """

    def __init__(self, triangulation, base=(0, 0)):
        self.triangulation = triangulation
        self.edge_rows = tuple(
            tuple((i, _PAIR[frozenset(e)]) for i, e in cls)
            for cls in triangulation.edge_classes)
        self._build_cusp_graph(base)

    @property
    def num_equations(self):
        return len(self.edge_rows) + 1

    def _build_cusp_graph(self, root):
        # The cusp cross section is a torus tiled by one triangle per
        # (tetrahedron, vertex).  Build a spanning tree of its dual graph;
        # the loops closed by the remaining sides generate the peripheral
        # group, each with an integer winding around the fiber direction.
        t = self.triangulation
        glu = t.gluings
        parent = {root: None}
        winding = {root: 0}
        order = [root]
        queue = deque([root])
        seen_sides = set()
        nontree = []
        while queue:
            node = queue.popleft()
            i, k = node
            for r in range(4):
                if r == k:
                    continue
                if (i, k, r) in seen_sides:
                    continue
                j, r2, sigma = glu[(i, r)]
                other = (j, sigma[k])
                seen_sides.add((i, k, r))
                seen_sides.add((j, sigma[k], r2))
                if other not in winding:
                    winding[other] = winding[node] + t.degrees[(i, r)]
                    parent[other] = (node, r)
                    order.append(other)
                    queue.append(other)
                else:
                    deg = winding[node] + t.degrees[(i, r)] - winding[other]
                    nontree.append(((i, k, r), (j, sigma[k], r2), deg))
        if len(order) != 4 * t.num_tetrahedra:
            raise NumericalError("cusp cross section is not connected")
        self._order = tuple(order)
        self._parent = parent
        self._nontree = tuple(nontree)
        candidates = [x for x in nontree if x[2] != 0]
        if not candidates:
            raise NumericalError("no peripheral loop winds around the fiber")
        self._complete = min(candidates, key=lambda x: (abs(x[2]), x[0]))

    def _develop(self, zs):
        # Similarity development of the cusp torus in C, rooted at the
        # reference corner.  Positions are indexed by the opposite vertex:
        # pos[(i, k)][m] is the end of tetrahedron edge {k, m} at vertex k.
        glu = self.triangulation.gluings
        pos = {}
        i0, k0 = self._order[0]
        cy = _cyc(k0)
        pos[(i0, k0)] = {cy[0]: 0j, cy[1]: 1 + 0j,
                         cy[2]: _corner(zs[i0], k0, cy[0])}
        for node in self._order[1:]:
            prev, r = self._parent[node]
            i, k = prev
            j, r2, sigma = glu[(i, r)]
            k2 = node[1]
            p = pos[prev]
            known = {}
            for m in _FACE[r]:
                if m != k:
                    known[sigma[m]] = p[m]
            cy = _cyc(k2)
            missing = next(m for m in cy if m not in known)
            ti = cy.index(missing)
            a_idx = cy[(ti + 1) % 3]
            b_idx = cy[(ti + 2) % 3]
            w = _corner(zs[j], k2, a_idx)
            known[missing] = known[a_idx] + w * (known[b_idx] - known[a_idx])
            pos[node] = known
        return pos

    def _side_holonomy(self, pos, side, other_side):
        # Affine map rewriting the tree placement of the far triangle into
        # the placement demanded by this side; complete structures make
        # every such derivative equal to 1.
        i, k, r = side
        j, k2, r2 = other_side
        sigma = self.triangulation.gluings[(i, r)][2]
        m1, m2 = (m for m in _FACE[r] if m != k)
        p = pos[(i, k)]
        q = pos[(j, k2)]
        rho = (p[m2] - p[m1]) / (q[sigma[m2]] - q[sigma[m1]])
        return rho, p[m1] - rho * q[sigma[m1]]

    def residual(self, shapes):
        """Equation residuals at the given shapes, edge rows first."""
        zs = _shape_array(shapes)
        logs = (np.log(zs), -np.log(1.0 - zs), np.log((zs - 1.0) / zs))
        out = np.empty(len(self.edge_rows) + 1, dtype=complex)
        for e, row in enumerate(self.edge_rows):
            out[e] = sum(logs[p][i] for i, p in row) - 2j * math.pi
        pos = self._develop(zs)
        rho, _ = self._side_holonomy(pos, self._complete[0],
                                     self._complete[1])
        out[-1] = cmath.log(rho)
        return out

    def holonomies(self, shapes):
        """(winding, derivative, translation) for each generating loop."""
        zs = _shape_array(shapes)
        pos = self._develop(zs)
        out = []
        for side, other_side, deg in self._nontree:
            rho, tr = self._side_holonomy(pos, side, other_side)
            out.append((deg, rho, tr))
        return out

    def developed_area(self, shapes):
        """Total euclidean area of the developed cusp triangles."""
        zs = _shape_array(shapes)
        total = 0.0
        for node, p in self._develop(zs).items():
            cy = _cyc(node[1])
            u = p[cy[1]] - p[cy[0]]
            w = p[cy[2]] - p[cy[0]]
            total += 0.5 * abs((u.conjugate() * w).imag)
        return total


def gluing_system(triangulation):
    """The gluing and completeness equations of a layered triangulation."""
    return GluingSystem(triangulation)


def solve_shapes(system, init=None, tol=1e-12):
    """Solve the gluing system by damped Newton iteration.

    ``init`` may be a ShapeVector, an iterable of complex numbers, the
    string "i" (every shape at i, the default) or "regular" (every shape
    at the hexagonal point (1 + i*sqrt(3))/2).  Shapes are kept in the
    open upper half plane; steps are halved until the residual drops.
    Raises DegenerateShape when flattening tetrahedra block all progress,
    Diverged when no step length helps, MaxIterations past the cap.  An
    already solved input returns immediately.
    """
    n = system.triangulation.num_tetrahedra
    if init is None or (isinstance(init, str) and init == "i"):
        z = np.full(n, 1j, dtype=complex)
    elif isinstance(init, str) and init == "regular":
        z = np.full(n, complex(0.5, math.sqrt(3.0) / 2.0), dtype=complex)
    elif isinstance(init, str):
        raise ValueError("unknown initial guess %r" % init)
    else:
        seed = init.shapes if isinstance(init, ShapeVector) else tuple(init)
        z = _shape_array(seed)
        if len(z) != n:
            raise ValueError("expected %d shapes, got %d" % (n, len(z)))

    floor = 1e-13
    f = system.residual(z)
    worst = float(np.max(np.abs(f)))
    if worst < tol:
        return ShapeVector(tuple(z))

    size = float(np.linalg.norm(f))
    h = 1e-7
    for _ in range(50):
        jac = np.empty((len(f), n), dtype=complex)
        for col in range(n):
            zp = z.copy()
            zp[col] += h
            jac[:, col] = (system.residual(zp) - f) / h
        step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            raise Diverged("Newton step is not finite")
        t = 1.0
        flattened = False
        while True:
            z2 = z + t * step
            if np.min(z2.imag) <= floor:
                flattened = True
            else:
                f2 = system.residual(z2)
                if np.all(np.isfinite(f2)):
                    size2 = float(np.linalg.norm(f2))
                    if size2 < size or np.max(np.abs(f2)) < tol:
                        z, f, size = z2, f2, size2
                        break
            t *= 0.5
            if t < 1e-12:
                if flattened:
                    raise DegenerateShape(
                        "shapes collapse onto the real line")
                raise Diverged("step halving cannot reduce the residual")
        worst = float(np.max(np.abs(f)))
        if worst < tol:
            return ShapeVector(tuple(z))
    raise MaxIterations("no convergence within 50 Newton steps")


# ---- volume --------------------------------------------------------------

def _lobachevsky(theta):
    # -integral_0^theta log|2 sin t| dt.  The reflection L(pi - t) = -L(t)
    # moves the range onto (0, pi/2]; there the logarithmic singularity is
    # integrated in closed form and the smooth remainder goes to quad.
    if theta > math.pi / 2.0:
        return -_lobachevsky(math.pi - theta)
    if theta <= 0.0:
        return 0.0

    def smooth(s):
        if s == 0.0:
            return math.log(2.0)
        return math.log(2.0 * math.sin(s) / s)

    rest = quad(smooth, 0.0, theta, epsabs=1e-13, epsrel=1e-13)[0]
    return -(theta * (math.log(theta) - 1.0) + rest)

def tetrahedron_volume(shape):
    """Volume of the ideal tetrahedron with the given upper-half shape."""
    z = complex(shape)
    if z.imag <= 0.0:
        raise DegenerateShape("shape %r has no volume" % (z,))
    angles = (cmath.phase(z), cmath.phase(1.0 / (1.0 - z)),
              cmath.phase((z - 1.0) / z))
    return sum(_lobachevsky(a) for a in angles)


def total_volume(shapes):
    """Volume of the bundle: the sum over its tetrahedra."""
    return sum(tetrahedron_volume(z) for z in _shape_array(shapes))


# ---- cusp cross section --------------------------------------------------

@dataclass(frozen=True)
class CuspCrossSection:
    """Flat data of the cusp torus at one horospherical cut.

    ``translations`` is a basis (mu, lam) of the peripheral lattice where
    lam is the holonomy of the fiber boundary (the longitude) and mu is a
    transverse curve winding once around the fiber direction; mu is only
    canonical modulo lam.  The area is the coarea of the lattice and the
    height is area divided by longitude length, so scaling the cut scales
    lengths linearly and the area quadratically.
    """
    translations: tuple
    area: float
    longitude_length: float
    height: float

    def __post_init__(self):
        mu, lam = (complex(w) for w in self.translations)
        object.__setattr__(self, "translations", (mu, lam))
        object.__setattr__(self, "area", float(self.area))
        object.__setattr__(self, "longitude_length",
                           float(self.longitude_length))
        object.__setattr__(self, "height", float(self.height))
        if not self.area > 0.0:
            raise NumericalError("cusp lattice is degenerate")
        if abs(self.height * self.longitude_length - self.area) \
                > 1e-9 * max(1.0, self.area):
            raise NumericalError("cusp height does not match the area")


def _primitive_translation(values, scale):
    # generator of a rank-one lattice of collinear complex numbers
    vals = [w for w in values if abs(w) > 1e-9 * scale]
    if not vals:
        raise NumericalError("fiber boundary loop has trivial holonomy")
    ref = max(vals, key=abs)
    unit = ref / abs(ref)
    reals = []
    for w in vals:
        x = w / unit
        if abs(x.imag) > 1e-6 * scale:
            raise NumericalError("peripheral translations are not collinear")
        reals.append(x.real)
    g = 0.0
    for x in reals:
        a, b = g, x
        while abs(b) > 1e-7 * scale:
            a, b = b, a - round(a / b) * b
        g = a
    for x in reals:
        if abs(x / g - round(x / g)) > 1e-6:
            raise NumericalError("peripheral translations are not commensurable")
    return g * unit


def _peripheral_basis(holonomies):
    # Integer row reduction on winding degrees: one generator keeps the
    # degree gcd (the transverse curve), the rest fall into the kernel of
    # the winding map, which is spanned by the fiber boundary.
    gens = [[deg, tr] for deg, _, tr in holonomies]
    scale = max(max(abs(g[1]) for g in gens), 1.0)
    while True:
        nonzero = [g for g in gens if g[0] != 0]
        if len(nonzero) <= 1:
            break
        nonzero.sort(key=lambda g: abs(g[0]))
        pivot = nonzero[0]
        for g in nonzero[1:]:
            q = round(g[0] / pivot[0])
            g[0] -= q * pivot[0]
            g[1] -= q * pivot[1]
    transverse = [g for g in gens if g[0] != 0]
    if len(transverse) != 1 or abs(transverse[0][0]) != 1:
        raise NumericalError("winding degrees do not span the fiber direction")
    lam = _primitive_translation([g[1] for g in gens if g[0] == 0], scale)
    mu = transverse[0][1] if transverse[0][0] == 1 else -transverse[0][1]
    return mu, lam


def cusp_cross_section(triangulation, shapes, base=(0, 0)):
    """Cusp torus of a solved triangulation at the reference cut.

    The cut is the horosphere on which the corner triangle of ``base``
    (a tetrahedron and vertex pair) develops with unit first side; with
    the default base this is the cut at euclidean height one over the
    first tetrahedron placed at (infinity, 0, 1, z_0).  Raises NotSolved
    unless the shapes satisfy the gluing and completeness equations to
    about 1e-8.
    """
    system = GluingSystem(triangulation, base=base)
    zs = _shape_array(shapes)
    res = system.residual(zs)
    if float(np.max(np.abs(res))) > 1e-8:
        raise NotSolved("shapes leave gluing residual %.3e"
                        % float(np.max(np.abs(res))))
    hol = system.holonomies(zs)
    for _, rho, _ in hol:
        if abs(rho - 1.0) > 1e-6:
            raise NotSolved("peripheral holonomy has derivative %r; "
                            "the structure is incomplete" % (rho,))
    mu, lam = _peripheral_basis(hol)
    area = abs((mu.conjugate() * lam).imag)
    if area <= 1e-12 * abs(mu) * abs(lam):
        raise NumericalError("peripheral translations are linearly dependent")
    return CuspCrossSection((mu, lam), area, abs(lam), area / abs(lam))


# ---- maximal cusp --------------------------------------------------------

def _std3(p, q, r):
    # Moebius matrix sending the projective points p, q, r to 0, inf, 1
    drq = r[0] * q[1] - r[1] * q[0]
    drp = r[0] * p[1] - r[1] * p[0]
    return (p[1] * drq, -p[0] * drq, q[1] * drp, -q[0] * drp)


def _mmul(m, w):
    a, b, c, d = m
    e, f, g, h = w
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _mapply(m, p):
    a, b, c, d = m
    return (a * p[0] + b * p[1], c * p[0] + d * p[1])


def _normalized(m):
    a, b, c, d = m
    det = a * d - b * c
    s = cmath.sqrt(det)
    return (a / s, b / s, c / s, d / s)


def _face_map(src_pts, dst_pts):
    # det-1 Moebius carrying the dst triple onto the src triple
    s_src = _std3(*src_pts)
    s_dst = _std3(*dst_pts)
    a, b, c, d = s_src
    inv = (d, -b, -c, a)
    return _normalized(_mmul(inv, s_dst))


class _HoroballDevelopment:
    """Breadth-first development of cusp lifts in the half space model.

    The stack is placed once, with tetrahedron 0 at (infinity, 0, 1, z_0)
    and the cusp lift at infinity cut at height one.  Every reachable
    copy of the fundamental domain is a deck image M of the stack, and
    the cusp lift it carries at M(infinity) is a ball of diameter
    1/|c|^2, where c is the lower left entry of M.  States are reduced
    modulo the peripheral lattice, so the pattern of balls over one
    fundamental parallelogram is enumerated once.
    """

    def __init__(self, triangulation, zs, lattice):
        t = triangulation
        n = t.num_tetrahedra
        self._mu, self._lam = lattice
        self._scale = max(abs(self._mu), abs(self._lam), 1.0)
        det = (self._mu.real * self._lam.imag
               - self._mu.imag * self._lam.real)
        self._lat_inv = ((self._lam.imag / det, -self._lam.real / det),
                         (-self._mu.imag / det, self._mu.real / det))
        std = [((1, 0), (0j, 1), (1, 1), (zs[i], 1)) for i in range(n)]
        base = [None] * n
        base[0] = std[0]
        for i in range(n - 1):
            j, _, sigma = t.gluings[(i, 2)]
            src = [base[i][m] for m in _FACE[2]]
            dst = [std[j][sigma[m]] for m in _FACE[2]]
            g = _face_map(src, dst)
            base[j] = tuple(_mapply(g, p) for p in std[j])
        self._base = base
        self._trans = {}
        for (i, r), (j, _, sigma) in t.gluings.items():
            src = [base[i][m] for m in _FACE[r]]
            dst = [base[j][sigma[m]] for m in _FACE[r]]
            self._trans[(i, r)] = (j, _face_map(src, dst))

    def _reduce(self, m):
        # translate the image of infinity into the base parallelogram
        a, b, c, d = m
        if abs(c) > 1e-9:
            w = a / c
        elif abs(d) > 1e-9:
            w = b / d
        else:
            return m
        (p, q), (r, s) = self._lat_inv
        x = math.floor(p * w.real + q * w.imag + 0.5)
        y = math.floor(r * w.real + s * w.imag + 0.5)
        if x or y:
            t = x * self._mu + y * self._lam
            return (a - t * c, b - t * d, c, d)
        return m

    def _key(self, j, m):
        # Coset invariants: left translation by the peripheral lattice
        # leaves c and d alone and moves the ball center by the lattice,
        # so the key uses c, d up to sign and the center's fractional
        # lattice coordinates.  The irrational offsets keep the centers
        # of the actual pattern away from the wrap-around boundary.
        a, b, c, d = m
        f = math.floor
        # quantize both signs and keep the smaller; min over the actual
        # quantizations makes the key exactly even under negation
        kc = (f(c.real * 1e6 + 0.5), f(c.imag * 1e6 + 0.5),
              f(d.real * 1e6 + 0.5), f(d.imag * 1e6 + 0.5))
        nc = (f(-c.real * 1e6 + 0.5), f(-c.imag * 1e6 + 0.5),
              f(-d.real * 1e6 + 0.5), f(-d.imag * 1e6 + 0.5))
        if nc < kc:
            kc = nc
        if abs(c) > 1e-9:
            w = a / c
        elif abs(d) > 1e-9:
            w = b / d
        else:
            w = 0j
        (p, q), (r, s) = self._lat_inv
        x = p * w.real + q * w.imag + 0.287471
        y = r * w.real + s * w.imag + 0.137913
        return (j, kc,
                f((x - f(x)) * 1e6 + 0.5), f((y - f(y)) * 1e6 + 0.5))

    def _small(self, j, m, threshold):
        # a copy far smaller than the best ball so far cannot carry a
        # bigger one; copies touching infinity are never pruned
        pts = []
        for p in self._base[j]:
            q = _mapply(m, p)
            if abs(q[1]) <= 1e-9 * (abs(q[0]) + abs(q[1])):
                return False
            pts.append(q[0] / q[1])
        p0, p1, p2, p3 = pts
        spread = max(abs(p0 - p1), abs(p0 - p2), abs(p0 - p3),
                     abs(p1 - p2), abs(p1 - p3), abs(p2 - p3))
        return spread < threshold

    def run(self, depth, budget=300000):
        """Largest horoball diameter, certified by depth doubling.

        Expands the breadth-first frontier level by level, recording the
        maximum at depths depth, 2*depth, 4*depth, ...; returns once two
        consecutive checkpoints agree (or the frontier is exhausted) and
        raises DepthUnstable past the final cap or the state budget.
        """
        ident = (1 + 0j, 0j, 0j, 1 + 0j)
        frontier = [(0, ident)]
        seen = {self._key(0, ident)}
        best = 0.0
        checkpoints = []
        level = 0
        cap = depth * 32
        while True:
            if not frontier:
                if best <= 0.0:
                    raise DepthUnstable("no horoball found before exhaustion")
                return best
            level += 1
            if level > cap:
                raise DepthUnstable("no stable maximum within depth %d" % cap)
            next_frontier = []
            for j, m in frontier:
                for r in range(4):
                    j2, t = self._trans[(j, r)]
                    m2 = self._reduce(_mmul(m, t))
                    key = self._key(j2, m2)
                    if key in seen:
                        continue
                    seen.add(key)
                    if len(seen) > budget:
                        raise DepthUnstable("horoball development exceeded "
                                            "%d states" % budget)
                    c = m2[2]
                    if abs(c) > 1e-7:
                        d = 1.0 / (abs(c) * abs(c))
                        if d > best:
                            best = d
                    threshold = max(best / 16.0, 1e-6 * self._scale)
                    if not self._small(j2, m2, threshold):
                        next_frontier.append((j2, m2))
            frontier = next_frontier
            if level % depth == 0 and (level // depth) & ((level // depth) - 1) == 0:
                # level is depth, 2*depth, 4*depth, ...
                checkpoints.append(best)
                if len(checkpoints) >= 3 and \
                        abs(checkpoints[-1] - checkpoints[-2]) <= 1e-9 * max(1.0, best) and \
                        abs(checkpoints[-2] - checkpoints[-3]) <= 1e-9 * max(1.0, best):
                    if best <= 0.0:
                        raise DepthUnstable("no horoball found")
                    return best


def maximal_cusp(triangulation, shapes, depth=8):
    """Cusp cross section at the first self-tangency of the cusp.

    Develops horoball lifts of the cusp outward from the stack to the
    given combinatorial depth, doubling until the largest ball diameter
    is stable twice; the maximal cut sits at the square root of that
    diameter over the reference normalization.  Raises DepthUnstable
    when no stable maximum appears within the depth and state budgets,
    and NotSolved on unsolved shapes.
    """
    reference = cusp_cross_section(triangulation, shapes)
    zs = _shape_array(shapes)
    mu, lam = reference.translations
    dev = _HoroballDevelopment(triangulation, zs, (mu, lam))
    diameter = dev.run(depth)
    h = math.sqrt(diameter)
    mu, lam = mu / h, lam / h
    area = reference.area / (h * h)
    return CuspCrossSection((mu, lam), area, abs(lam), area / abs(lam))


# ---- reports -------------------------------------------------------------

def bundle_report(word, tol=1e-12, depth=8, init="i"):
    """Solve a bundle end to end; returns a JSON-ready dictionary."""
    t = layered_triangulation(word)
    system = gluing_system(t)
    solved = solve_shapes(system, init=init, tol=tol)
    residual = float(np.max(np.abs(system.residual(solved))))
    cusp = maximal_cusp(t, solved, depth=depth)
    return {
        "word": word,
        "shapes": [[z.real, z.imag] for z in solved],
        "residual": residual,
        "volume": total_volume(solved),
        "cusp_area": cusp.area,
        "longitude": cusp.longitude_length,
        "height": cusp.height,
    }
