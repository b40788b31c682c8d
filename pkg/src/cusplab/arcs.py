"""Essential arcs in normal coordinates and the arc complex metric.

An arc runs from the preferred puncture back to itself and is stored by its
normal position with respect to the base triangulation: `edge_weights` counts
transverse crossings with each edge and `corner_data` counts the strands
cutting off each triangle corner.  Inside a triangle a strand either cuts off
a corner (crossing the two sides at that vertex) or runs from a vertex to the
opposite side, so the weight of the side at slot s of triangle t splits as

    w(t, s) = corner(t, s) + corner(t, s+1) + vertex(t, s+2)

and the vertex counts are derived, never stored.  An arc isotopic onto an
edge has no transverse position at all; it is kept as a degenerate marker
(`along_edge`) and its published weight vector is the unit indicator of that
edge.  The indicator is also the honest crossing vector of a different arc,
the one meeting that edge once and nothing else, so the marker, not the
vector, is what equality and serialization trust.

Coordinates move across a flip by matching strands through the flipped
quadrilateral P, Q, R, S: old diagonal Q-S, new diagonal P-R, sides A: P-Q,
B: Q-R, C: R-S, D: S-P.  Read from the Q end, the crossings of the old
diagonal list first the strands cutting off Q, then the strands into the
opposite vertex, then the strands cutting off S, on both sides at once; the
positional overlap of the two block decompositions classifies every crossing
strand, and `_flip_coords` rewrites each class.  The same table through the
reverse flip undoes it, which is how arcs found after a flip sequence are
expressed back in base coordinates.

Distances are breadth-first searches in the arc complex restricted to arcs
whose coordinate sum fits a budget.  Neighbor enumeration is constructive:
flip the arc down onto an edge, then explore the triangulations that keep
that edge, collecting their puncture-to-puncture edges.  Truncation is
honest; a search that runs out of room raises Unreachable or BudgetExceeded
rather than reporting a number that might be too small.
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import (BaseMismatch, BudgetExceeded, NotAnArc, PunctureMoved,
                     Unreachable)
from .farey import Slope
from .surface import (IdealTriangulation, Relabeling, find_relabelings,
                      once_punctured_torus)

__all__ = [
    "NormalArc", "MappingClass", "arcs_of", "intersection_number", "distance",
    "apply_mcg", "mapping_class", "iso_mapping_class", "translation_distance",
    "stable_distance_upper", "lift_arc", "slope_arc", "arc_slope",
    "parse_arc", "arc_to_json", "arc_from_json",
]


# ---- coordinate transport ----

def _flip_coords(record, w, c, par):
    """Transport sparse coordinates (w, c, par) across one recorded flip.

    Valid for any normal system of disjoint arcs, not just a single one;
    returns fresh dicts holding only nonzero entries.
    """
    e, f = record.edge, record.new_edge
    (t, a), (u, b) = record.old_slots
    lblA, lblB, lblC, lblD = (record.sides[x] for x in "ABCD")
    w2, c2, par2 = dict(w), dict(c), dict(par)
    w_e = w2.pop(e, 0)
    par_e = par2.pop(e, 0)
    cQt = c2.pop((t, a), 0)
    cSt = c2.pop((t, (a + 1) % 3), 0)
    cPt = c2.pop((t, (a + 2) % 3), 0)
    cSu = c2.pop((u, b), 0)
    cQu = c2.pop((u, (b + 1) % 3), 0)
    cRu = c2.pop((u, (b + 2) % 3), 0)
    vP = w_e - cQt - cSt
    vR = w_e - cQu - cSu
    vQt = w.get(lblD, 0) - cSt - cPt
    vSt = w.get(lblA, 0) - cPt - cQt
    vQu = w.get(lblC, 0) - cRu - cSu
    vSu = w.get(lblB, 0) - cQu - cRu
    if min(vP, vR, vQt, vSt, vQu, vSu) < 0:
        raise NotAnArc("matching equations fail on the flipped quadrilateral")

    # block decomposition of the old diagonal's crossings, from the Q end:
    # breakpoints (0, cQt, cQt+vP, w_e) against (0, cQu, cQu+vR, w_e); only
    # the corner blocks and the middle overlap are needed
    n00 = min(cQt, cQu)
    n22 = max(0, w_e - max(cQt + vP, cQu + vR))
    n02 = max(0, cQt - cQu - vR)
    n20 = max(0, cQu - cQt - vP)
    n11 = max(0, min(cQt + vP, cQu + vR) - max(cQt, cQu))

    # new triangles t' = (P, Q, R) and u' = (R, S, P); sides A, B at slots
    # (t, 0), (t, 1) and C, D at (u, 0), (u, 1); f at slot 2 of both
    new_c = {
        (t, 1): n00,               # A-to-B strands cut off Q
        (u, 1): n22,               # D-to-C strands cut off S
        (t, 0): n02 + cPt + vSt,   # corner P of t'
        (u, 2): n20 + cPt + vQt,   # corner P of u'
        (u, 0): n02 + cRu + vQu,   # corner R of u'
        (t, 2): n20 + cRu + vSu,   # corner R of t'
    }
    for k, v in new_c.items():
        if v:
            c2[k] = v
    wf = n02 + n20 + cPt + cRu + vQt + vSt + vQu + vSu + par_e
    if wf:
        w2[f] = wf
    if n11:
        par2[f] = n11              # P-to-R strands land on the new edge
    return w2, c2, par2


_FLIP_CACHE = {}
_REV_CACHE = {}


def _flip_cached(tri, e):
    """tri.flip(e), memoized; searches revisit the same flips constantly."""
    key = (tri, e)
    hit = _FLIP_CACHE.get(key)
    if hit is None:
        hit = tri.flip(e)
        if len(_FLIP_CACHE) < 100000:
            _FLIP_CACHE[key] = hit
    return hit


def _reverse_transform(tri_flipped, record):
    """Reusable data undoing one flip: (reverse record, relabeling, edge)."""
    key = (tri_flipped, record.edge, record.new_edge, record.old_slots)
    hit = _REV_CACHE.get(key)
    if hit is None:
        _, rec2 = _flip_cached(tri_flipped, record.new_edge)
        rho = record.inverse_relabeling(tri_flipped.num_triangles)
        hit = (rec2, rho, record.edge)
        if len(_REV_CACHE) < 100000:
            _REV_CACHE[key] = hit
    return hit


def _apply_reverse(step, w, c, par):
    rec2, rho, old_edge = step
    w, c, par = _flip_coords(rec2, w, c, par)
    w = {(old_edge if k == rec2.new_edge else k): v for k, v in w.items()}
    par = {(old_edge if k == rec2.new_edge else k): v for k, v in par.items()}
    c = {rho.corner_image(t, k): v for (t, k), v in c.items()}
    return w, c, par


def _unflip_coords(tri_flipped, record, w, c, par):
    """Undo `record`: coordinates on the flipped surface back to the start."""
    return _apply_reverse(_reverse_transform(tri_flipped, record), w, c, par)


def _replay(base, flips):
    """Apply a flip word; returns ([base, T1, ..., Tn], records)."""
    tris = [base]
    records = []
    for e in flips:
        nxt, rec = _flip_cached(tris[-1], e)
        tris.append(nxt)
        records.append(rec)
    return tris, records


def _pull_back(tris, records, w, c, par):
    """Coordinates on the end of a replayed path, rewritten on its start."""
    for i in reversed(range(len(records))):
        w, c, par = _unflip_coords(tris[i + 1], records[i], w, c, par)
    return w, c, par


# ---- strand tracing ----

def _canonical_pos(tri, t, s, j, width):
    """Crossing j from the tail of slot (t, s), as an (edge, index) point.

    Crossings of an edge are indexed from the tail of its lexicographically
    smaller slot; the gluing reverses direction, so read from the other slot
    position j becomes width - 1 - j.
    """
    e = tri.edge_label(t, s)
    smaller, _ = tri.edges[e]
    if (t, s) == smaller:
        return (e, j)
    return (e, width - 1 - j)


def _strand_segments(tri, w, c):
    """Every strand as (ptA, slotA, ptB, slotB, home corner, kind).

    Corner strands connect two crossing points; vertex strands connect one
    crossing point to an endpoint marker ("end", t, k, j).  Raises NotAnArc
    when a derived vertex count goes negative.
    """
    segments = []
    for t in range(tri.num_triangles):
        W = [w.get(tri.edge_label(t, s), 0) for s in range(3)]
        C = [c.get((t, k), 0) for k in range(3)]
        V = [W[(k + 1) % 3] - C[(k + 1) % 3] - C[(k + 2) % 3] for k in range(3)]
        if min(V) < 0:
            raise NotAnArc("matching equations fail at triangle %d" % t)
        for k in range(3):
            km, kp = (k + 2) % 3, (k + 1) % 3
            for j in range(C[k]):
                segments.append((
                    _canonical_pos(tri, t, k, j, W[k]), (t, k),
                    _canonical_pos(tri, t, km, W[km] - 1 - j, W[km]), (t, km),
                    (t, k), "corner"))
            for j in range(V[k]):
                segments.append((
                    _canonical_pos(tri, t, kp, C[kp] + j, W[kp]), (t, kp),
                    ("end", t, k, j), None,
                    (t, k), "vertex"))
    return segments


def _segment_adjacency(segments):
    adj = {}
    for idx, seg in enumerate(segments):
        adj.setdefault(seg[0], []).append(idx)
        if seg[5] == "corner":
            adj.setdefault(seg[2], []).append(idx)
    for point, inc in adj.items():
        if len(inc) != 2:
            raise NotAnArc("crossing %r met %d strand ends, not 2"
                           % (point, len(inc)))
    return adj


def _components(tri, w, c):
    """(open chains, closed loop count) of the strand system.

    Each chain is reported as the pair of corners holding its endpoints.
    """
    segments = _strand_segments(tri, w, c)
    adj = _segment_adjacency(segments)
    used = [False] * len(segments)
    chains = []
    for idx, seg in enumerate(segments):
        if used[idx] or seg[5] != "vertex":
            continue
        used[idx] = True
        first = seg[4]
        point = seg[0]
        while True:
            nidx = next((i for i in adj[point] if not used[i]), None)
            if nidx is None:
                raise NotAnArc("strand chain breaks at %r" % (point,))
            used[nidx] = True
            nseg = segments[nidx]
            if nseg[5] == "vertex":
                chains.append((first, nseg[4]))
                break
            point = nseg[2] if nseg[0] == point else nseg[0]
    loops = 0
    for idx, seg in enumerate(segments):
        if used[idx]:
            continue
        loops += 1
        used[idx] = True
        stop = seg[0]
        point = seg[2]
        while point != stop:
            nidx = next((i for i in adj[point] if not used[i]), None)
            if nidx is None:
                raise NotAnArc("strand loop breaks at %r" % (point,))
            used[nidx] = True
            nseg = segments[nidx]
            point = nseg[2] if nseg[0] == point else nseg[0]
    return chains, loops


def _arc_walk(tri, w, c):
    """Ordered steps of a validated single arc, endpoint to endpoint.

    Steps are ("cross", edge label, leaving slot) and ("corner", (t, k));
    the leaving slot drives sheet bookkeeping when walking in a cover.
    """
    segments = _strand_segments(tri, w, c)
    adj = _segment_adjacency(segments)
    start = min(i for i, s in enumerate(segments) if s[5] == "vertex")
    used = {start}
    point, slot = segments[start][0], segments[start][1]
    steps = []
    while True:
        steps.append(("cross", point[0], slot))
        nidx = next(i for i in adj[point] if i not in used)
        used.add(nidx)
        nseg = segments[nidx]
        if nseg[5] == "vertex":
            return steps
        steps.append(("corner", nseg[4]))
        if nseg[0] == point:
            point, slot = nseg[2], nseg[3]
        else:
            point, slot = nseg[0], nseg[1]


# ---- the arc itself ----

class NormalArc:
    """An essential arc from the preferred puncture back to itself.

    Build one from published coordinate vectors, from a degenerate `along`
    edge label, or through the module constructors.  Construction validates
    everything: matching equations, connectedness, no closed components,
    and both endpoints at the preferred puncture.
    """

    __slots__ = ("base", "along", "_w", "_c", "_key", "_hash")

    def __init__(self, base, edge_weights=None, corner_data=None, along=None):
        if along is not None:
            if edge_weights is not None or corner_data is not None:
                raise NotAnArc("give either vectors or a degenerate edge")
            self._init_from(base, {}, {}, {along: 1})
            return
        labels = base.edge_labels
        wv = tuple(int(x) for x in (edge_weights if edge_weights else ()))
        cv = tuple(int(x) for x in (corner_data if corner_data else ()))
        if len(wv) != len(labels):
            raise NotAnArc("need %d edge weights" % len(labels))
        if len(cv) != 3 * base.num_triangles:
            raise NotAnArc("need %d corner entries" % (3 * base.num_triangles))
        if min(wv) < 0 or min(cv) < 0:
            raise NotAnArc("coordinates must be nonnegative")
        # a unit indicator with no corner data is the published form of the
        # degenerate arc running along that edge
        if sum(wv) == 1 and sum(cv) == 0:
            self._init_from(base, {}, {}, {labels[wv.index(1)]: 1})
            return
        w = {e: x for e, x in zip(labels, wv) if x}
        c = {(t, k): cv[3 * t + k]
             for t in range(base.num_triangles) for k in range(3)
             if cv[3 * t + k]}
        self._init_from(base, w, c, {})

    @classmethod
    def _make(cls, base, w, c, par):
        """Internal: from sparse dicts carrying true crossing semantics."""
        self = cls.__new__(cls)
        self._init_from(base, w, c, par)
        return self

    def _init_from(self, base, w, c, par):
        w = {k: int(v) for k, v in w.items() if v}
        c = {k: int(v) for k, v in c.items() if v}
        par = {k: int(v) for k, v in par.items() if v}
        if any(v < 0 for v in w.values()) or any(v < 0 for v in c.values()):
            raise NotAnArc("coordinates must be nonnegative")
        for e in w:
            if e not in base.edges:
                raise NotAnArc("no edge labelled %r" % (e,))
        for (t, k) in c:
            if not (0 <= t < base.num_triangles and 0 <= k < 3):
                raise NotAnArc("no corner (%r, %r)" % (t, k))
        if par:
            if w or c or sorted(par.values()) != [1]:
                raise NotAnArc("a degenerate arc is one edge and nothing else")
            (e,) = par
            if e not in base.edges:
                raise NotAnArc("no edge labelled %r" % (e,))
            tail, head = base.edge_punctures(e)
            if not (tail == base.preferred == head):
                raise NotAnArc("edge %r does not run from the preferred "
                               "puncture to itself" % (e,))
            along = e
        else:
            if not w and not c:
                raise NotAnArc("empty coordinates describe no arc")
            chains, loops = _components(base, w, c)
            if loops:
                raise NotAnArc("coordinates contain a closed curve")
            if len(chains) != 1:
                raise NotAnArc("coordinates describe %d arcs, not one"
                               % len(chains))
            for corner in chains[0]:
                pk = base.puncture_of(corner)
                if pk != base.preferred:
                    raise NotAnArc("endpoint at puncture %d, not the "
                                   "preferred %d" % (pk, base.preferred))
            along = None
        self.base = base
        self.along = along
        self._w = w
        self._c = c
        self._key = (along, tuple(sorted(w.items())), tuple(sorted(c.items())))
        self._hash = hash((self._key, base))

    # -- published coordinates --

    @property
    def edge_weights(self):
        labels = self.base.edge_labels
        if self.along is not None:
            return tuple(int(e == self.along) for e in labels)
        return tuple(self._w.get(e, 0) for e in labels)

    @property
    def corner_data(self):
        return tuple(self._c.get((t, k), 0)
                     for t in range(self.base.num_triangles) for k in range(3))

    @property
    def endpoints(self):
        return (self.base.preferred, self.base.preferred)

    @property
    def along_edge(self):
        return self.along

    @property
    def coord_sum(self):
        return sum(self.edge_weights) + sum(self.corner_data)

    def _dicts(self):
        if self.along is not None:
            return {}, {}, {self.along: 1}
        return dict(self._w), dict(self._c), {}

    def _sort_key(self):
        return (self.coord_sum, self.edge_weights, self.corner_data,
                -1 if self.along is None else self.along)

    # -- identity --

    def __eq__(self, other):
        return (isinstance(other, NormalArc) and self._key == other._key
                and self.base == other.base)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.along is not None:
            return "<NormalArc along edge %r of %s>" % (self.along,
                                                        self.base.name)
        return "<NormalArc %s;%s on %s>" % (
            ",".join(map(str, self.edge_weights)),
            ",".join(map(str, self.corner_data)), self.base.name)

    # -- text and JSON forms --

    def literal(self):
        return "arc %s;%s" % (",".join(map(str, self.edge_weights)),
                              ",".join(map(str, self.corner_data)))

    def to_json(self):
        return {"edge_weights": list(self.edge_weights),
                "corner_data": list(self.corner_data),
                "along": self.along}


def arc_to_json(a):
    return a.to_json()


def arc_from_json(base, obj):
    """Inverse of to_json; faithful, since "along" is carried explicitly."""
    if obj.get("along") is not None:
        return NormalArc(base, along=obj["along"])
    labels = base.edge_labels
    wv, cv = obj["edge_weights"], obj["corner_data"]
    if len(wv) != len(labels) or len(cv) != 3 * base.num_triangles:
        raise NotAnArc("coordinate vector lengths do not match the surface")
    w = {e: v for e, v in zip(labels, wv) if v}
    c = {}
    for t in range(base.num_triangles):
        for k in range(3):
            if cv[3 * t + k]:
                c[(t, k)] = cv[3 * t + k]
    return NormalArc._make(base, w, c, {})


def parse_arc(base, text):
    """Arc from `arc w0,..;c0,..` or, on the standard torus, `slope p/q`.

    A unit indicator weight vector with zero corner data reads as the arc
    lying along that edge; the arc crossing one edge transversely once has
    the same published vector and is reached through its slope instead.
    """
    tok = text.strip().split(None, 1)
    if len(tok) != 2:
        raise NotAnArc("expected 'arc ...' or 'slope ...', got %r" % (text,))
    kind, body = tok[0], tok[1].strip()
    if kind == "slope":
        return slope_arc(base, Slope.parse(body))
    if kind != "arc":
        raise NotAnArc("unknown arc literal %r" % (text,))
    parts = body.split(";")
    if len(parts) != 2:
        raise NotAnArc("arc literal needs 'weights;corners'")
    try:
        wv = [int(x) for x in parts[0].split(",") if x.strip()]
        cv = [int(x) for x in parts[1].split(",") if x.strip()]
    except ValueError:
        raise NotAnArc("arc literal entries must be integers")
    return NormalArc(base, edge_weights=wv, corner_data=cv)


# ---- arcs carried by a flip word ----

def arcs_of(base, flips=()):
    """Puncture-to-puncture edges of the flipped surface, in base coordinates.

    With no flips these are the base edges at the preferred puncture, each a
    degenerate arc.  Edges with an endpoint at another puncture are not
    vertices of the arc complex and are left out.
    """
    tris, records = _replay(base, tuple(flips))
    tri = tris[-1]
    out = []
    for g in tri.edge_labels:
        tail, head = tri.edge_punctures(g)
        if not (tail == tri.preferred == head):
            continue
        w, c, par = _pull_back(tris, records, {}, {}, {g: 1})
        out.append(NormalArc._make(base, w, c, par))
    return out


# ---- reduction to an edge, intersections, neighbors, distance ----

def _reduce(a, max_flips=None):
    """Flip until `a` lies along an edge; returns (tris, records, edge).

    Greedy choice of the flip minimizing the transported crossing total,
    tolerating plateaus but never revisiting a state, so the walk either
    reaches an edge or raises BudgetExceeded honestly.
    """
    if a.along is not None:
        return [a.base], [], a.along
    w, c, par = a._dicts()
    tris = [a.base]
    records = []
    cap = max_flips if max_flips is not None else 6 * sum(w.values()) + 24
    seen = set()
    while not par:
        if len(records) >= cap:
            raise BudgetExceeded("reduction to an edge still running after "
                                 "%d flips" % len(records))
        tri = tris[-1]
        seen.add((tuple(sorted(w.items())), tuple(sorted(c.items()))))
        total = sum(w.values())
        best = None
        for e in sorted(w):
            (t, _), (u, _) = tri.edges[e]
            if t == u:
                continue
            nxt, rec = tri.flip(e)
            w2, c2, par2 = _flip_coords(rec, w, c, par)
            total2 = sum(w2.values())
            if total2 > total:
                continue
            key2 = (tuple(sorted(w2.items())), tuple(sorted(c2.items())))
            if total2 == total and key2 in seen:
                continue
            cand = (total2, e, nxt, rec, w2, c2, par2)
            if best is None or cand[:2] < best[:2]:
                best = cand
        if best is None:
            raise BudgetExceeded("no weight-reducing flip from %r" % (a,))
        _, _, nxt, rec, w, c, par = best
        tris.append(nxt)
        records.append(rec)
    (e_star,) = par
    return tris, records, e_star


def intersection_number(a, b):
    """Geometric intersection number of two arc classes on one base.

    Flips carry `a` onto an edge of some triangulation; `b` is in normal
    position there, minimal with respect to every edge at once, so its
    crossing weight on that edge is the minimal crossing count with `a`.
    Zero exactly when the classes coincide or span an edge of the complex.
    """
    if not isinstance(a, NormalArc) or not isinstance(b, NormalArc):
        raise BaseMismatch("intersection_number wants two NormalArcs")
    if a.base != b.base:
        raise BaseMismatch("arcs live on different triangulations")
    if a == b:
        return 0
    _, records, e_star = _reduce(a)
    w, c, par = b._dicts()
    for rec in records:
        w, c, par = _flip_coords(rec, w, c, par)
    if par:
        # b lies along an edge of the reduced triangulation, missing a
        return 0
    return w.get(e_star, 0)


def _raw_key(w, c, par):
    return (tuple(sorted(w.items())), tuple(sorted(c.items())),
            tuple(sorted(par.items())))


_NEIGHBOR_CACHE = {}
_ARC_CACHE = {}


def _arc_from_raw(base, w, c, par):
    key = (base, _raw_key(w, c, par))
    arc = _ARC_CACHE.get(key)
    if arc is None:
        arc = NormalArc._make(base, w, c, par)
        if len(_ARC_CACHE) < 200000:
            _ARC_CACHE[key] = arc
    return arc


def _to_base(w, c, par, chain):
    """Pull raw coords down a linked list of reverse-transform steps."""
    while chain is not None:
        step, chain = chain
        w, c, par = _apply_reverse(step, w, c, par)
    return w, c, par


def _raw_size(w, c, par):
    return sum(w.values()) + sum(c.values()) + sum(par.values())


def _neighbors(a, budget):
    """Arcs disjoint from `a` with coordinate sum at most `budget`.

    Every arc disjoint from `a` shows up as an edge of some triangulation
    having `a` itself as an edge, and those triangulations are connected to
    each other by flips that avoid that edge.  Flips whose new diagonal
    already exceeds the budget are pruned, so the enumeration can only miss
    far-away arcs and distances built on it never come out too small.

    Each search state keeps the base-coordinate expression of all its edges,
    so a flip only has to transport the one fresh diagonal: the flipped copy
    of an edge e runs along the new edge, and one step back that is a single
    crossing of e, so its base coords are _to_base({e: 1}, {}, {}, chain).
    """
    ckey = (a, budget)
    hit = _NEIGHBOR_CACHE.get(ckey)
    if hit is not None:
        return hit
    tris, records, e_star = _reduce(a)
    base = a.base

    rev = None
    for i in range(len(records)):
        rev = (_reverse_transform(tris[i + 1], records[i]), rev)

    tri0 = tris[-1]
    coords0 = {g: _to_base({}, {}, {g: 1}, rev) for g in tri0.edge_labels}
    keys0 = {g: _raw_key(*v) for g, v in coords0.items()}
    seen = {frozenset(keys0.values())}
    queue = deque([(tri0, coords0, keys0, rev)])
    out = set()
    while queue:
        tri, coords, keys, chain = queue.popleft()
        for g in tri.edge_labels:
            if g == e_star:
                continue
            tail, head = tri.edge_punctures(g)
            if not (tail == tri.preferred == head):
                continue
            w, c, par = coords[g]
            if _raw_size(w, c, par) > budget:
                continue
            arc = _arc_from_raw(base, w, c, par)
            if arc != a:
                out.add(arc)
        for g in tri.edge_labels:
            if g == e_star:
                continue
            (t, _), (u, _) = tri.edges[g]
            if t == u:
                continue
            fresh = _to_base({g: 1}, {}, {}, chain)
            if _raw_size(*fresh) > budget:
                continue
            fkey = _raw_key(*fresh)
            skey = frozenset(v for h, v in keys.items() if h != g) | {fkey}
            if skey in seen:
                continue
            seen.add(skey)
            nxt, rec = _flip_cached(tri, g)
            child = dict(coords)
            del child[g]
            child[rec.new_edge] = fresh
            ckeys = dict(keys)
            del ckeys[g]
            ckeys[rec.new_edge] = fkey
            queue.append((nxt, child, ckeys,
                          (_reverse_transform(nxt, rec), chain)))
    result = tuple(sorted(out, key=NormalArc._sort_key))
    if len(_NEIGHBOR_CACHE) < 200000:
        _NEIGHBOR_CACHE[ckey] = result
    return result


def distance(a, b, radius_cap=None, budget=64):
    """Length of a shortest path from a to b in the budget-capped complex.

    Raises BudgetExceeded when an input itself exceeds the budget and
    Unreachable when the search exhausts the radius cap or the capped
    complex without meeting b; truncation never reports a smaller number.
    """
    if a.base != b.base:
        raise BaseMismatch("arcs live on different triangulations")
    if a.coord_sum > budget or b.coord_sum > budget:
        raise BudgetExceeded("arc coordinates exceed the budget %d" % budget)
    if a == b:
        return 0
    visited = {a}
    frontier = [a]
    r = 0
    while frontier:
        r += 1
        if radius_cap is not None and r > radius_cap:
            raise Unreachable("no path of length < %d within budget %d"
                              % (r, budget))
        nxt = []
        for v in sorted(frontier, key=NormalArc._sort_key):
            for nb in _neighbors(v, budget):
                if nb == b:
                    return r
                if nb not in visited:
                    visited.add(nb)
                    nxt.append(nb)
        frontier = nxt
    raise Unreachable("the capped complex around the source (budget %d) "
                      "does not reach the target" % budget)


# ---- mapping classes ----

@dataclass(frozen=True)
class _Segment:
    """One flip word closed up by an isomorphism back onto the base."""
    flips: tuple
    emap: tuple          # (final label, base label) pairs, sorted
    relab: Relabeling
    letter: str
    fixes_p: bool


def _rename_edges(tri, mapping):
    """Relabel edges by a bijection, via temporaries to dodge collisions."""
    items = [(o, n) for o, n in sorted(mapping.items()) if o != n]
    spare = max(max(tri.edge_labels, default=0),
                max(mapping.values(), default=0)) + 1
    for i, (old, _) in enumerate(items):
        tri = tri.relabel_edge(old, spare + i)
    for i, (_, new) in enumerate(items):
        tri = tri.relabel_edge(spare + i, new)
    return tri


def _close_segment(base, flips, emap, letter=""):
    """Validate a flip word plus edge renaming as a self-map of the base."""
    tris, _ = _replay(base, flips)
    ren = dict(emap)
    final = tris[-1]
    if sorted(ren) != sorted(final.edge_labels) or \
            sorted(ren.values()) != sorted(base.edge_labels):
        raise ValueError("edge map must be a bijection onto the base labels")
    renamed = _rename_edges(final, ren)
    cands = find_relabelings(renamed, base, match_labels=True)
    if not cands:
        raise ValueError("flip word does not close up onto the base")
    keeping = [r for r in cands
               if r.apply(renamed).preferred == base.preferred]
    relab = (keeping or cands)[0]
    return _Segment(flips=tuple(flips), emap=tuple(sorted(ren.items())),
                    relab=relab, letter=letter, fixes_p=bool(keeping))


def _segment_transport(base, seg, w, c, par):
    _, records = _replay(base, seg.flips)
    for rec in records:
        w, c, par = _flip_coords(rec, w, c, par)
    ren = dict(seg.emap)
    w = {ren.get(k, k): v for k, v in w.items()}
    par = {ren.get(k, k): v for k, v in par.items()}
    c = {seg.relab.corner_image(t, k): v for (t, k), v in c.items()}
    return w, c, par


def _invert_segment(base, seg):
    """The inverse segment, unwinding the flips from the far end.

    `nu` tracks the inverse-path label currently matching each live
    forward-path label; undoing a forward flip must flip the edge its new
    diagonal is identified with, and revives the edge the flip destroyed.
    """
    tri = base
    recs = []
    for e in seg.flips:
        tri, r = tri.flip(e)
        recs.append(r)
    nu = dict(seg.emap)
    cur = base
    flips = []
    for r in reversed(recs):
        target = nu.pop(r.new_edge)
        cur, rec2 = cur.flip(target)
        flips.append(target)
        nu[r.edge] = rec2.new_edge
    emap = {g: b for b, g in nu.items()}
    return _close_segment(base, tuple(flips), emap,
                          letter=seg.letter.swapcase())


# flip word and closing edge map realizing each standard torus twist; each
# segment acts on slopes exactly as the matching Farey matrix
_LETTER_DATA = {
    "R": ((2,), ((0, 2), (1, 1), (3, 0))),
    "L": ((2,), ((0, 0), (1, 2), (3, 1))),
    "r": ((0,), ((1, 1), (2, 0), (3, 2))),
    "l": ((1,), ((0, 0), (2, 1), (3, 2))),
}
_LETTER_CACHE = {}


def _letter_segment(letter):
    seg = _LETTER_CACHE.get(letter)
    if seg is None:
        flips, emap = _LETTER_DATA[letter]
        seg = _close_segment(once_punctured_torus(), flips, dict(emap), letter)
        _LETTER_CACHE[letter] = seg
    return seg


@dataclass(frozen=True)
class MappingClass:
    """A homeomorphism up to isotopy, as flip words closed by isomorphisms.

    `segments` apply left to right; `fixes_p` records whether the preferred
    puncture returns to itself, which acting on A(F, p) requires.
    """
    base: IdealTriangulation
    segments: tuple
    word: str
    fixes_p: bool

    def __mul__(self, other):
        """self after other, matching matrix products of twist words."""
        if not isinstance(other, MappingClass):
            return NotImplemented
        if self.base != other.base:
            raise BaseMismatch("mapping classes on different triangulations")
        return MappingClass(self.base, other.segments + self.segments,
                            self.word + other.word,
                            self.fixes_p and other.fixes_p)

    def inverse(self):
        segs = tuple(_invert_segment(self.base, s)
                     for s in reversed(self.segments))
        return MappingClass(self.base, segs, "(" + self.word + ")^-1",
                            self.fixes_p)

    def __repr__(self):
        return "<MappingClass %s on %s>" % (self.word or "1", self.base.name)


def mapping_class(base, word):
    """The mapping class of an R/L twist word on the standard torus.

    Letters act like their Farey matrices: the rightmost letter applies
    first, so the induced action on slopes is multiplication by the word's
    matrix product.
    """
    if base != once_punctured_torus():
        raise BaseMismatch("twist words are defined on the standard torus "
                           "triangulation")
    for ch in word:
        if ch not in ("R", "L"):
            raise ValueError("letters must be R or L, got %r" % (ch,))
    segs = tuple(_letter_segment(ch) for ch in reversed(word))
    return MappingClass(base, segs, word, True)


def iso_mapping_class(base, relab, word="iso"):
    """The mapping class of a combinatorial automorphism of the base."""
    image = relab.apply(base)
    if image._glued != base._glued:
        raise BaseMismatch("relabeling is not an automorphism of the base")
    emap = {}
    for e, ((t, s), _) in image.edges.items():
        emap[e] = base.edge_label(t, s)
    renamed = _rename_edges(image, emap)
    if renamed._edge_of_slot != base._edge_of_slot:
        raise BaseMismatch("relabeling does not respect the edge labels")
    seg = _Segment(flips=(), emap=tuple(sorted(emap.items())), relab=relab,
                   letter=word, fixes_p=(image.preferred == base.preferred))
    return MappingClass(base, (seg,), word, seg.fixes_p)


def apply_mcg(phi, a):
    """The image of the arc under the mapping class, in base coordinates."""
    if phi.base != a.base:
        raise BaseMismatch("arc and mapping class on different bases")
    if not phi.fixes_p:
        raise PunctureMoved("the mapping class moves the preferred puncture, "
                            "so images leave A(F, p)")
    w, c, par = a._dicts()
    for seg in phi.segments:
        w, c, par = _segment_transport(phi.base, seg, w, c, par)
    return NormalArc._make(phi.base, w, c, par)


# ---- translation and stable distances ----

def translation_distance(phi, budget=64, with_certificate=False):
    """min over explored arcs v of d(v, phi(v)) in the capped complex.

    Candidates come from the breadth-first ball around the base edges; the
    ball grows until the running minimum survives two consecutive layers,
    certifying stability of the search.  A minimum that never stabilizes
    before the capped complex runs out is returned uncertified.
    """
    candidates = [v for v in arcs_of(phi.base) if v.coord_sum <= budget]
    if not candidates:
        raise BudgetExceeded("no base arc fits the budget %d" % budget)
    frontier = sorted(candidates, key=NormalArc._sort_key)
    ball = set(frontier)
    best = None
    stable = 0
    certified = False
    radius = 0
    while True:
        improved = False
        for v in frontier:
            try:
                img = apply_mcg(phi, v)
                if img.coord_sum > budget:
                    continue
                d = distance(v, img, budget=budget)
            except (BudgetExceeded, Unreachable):
                continue
            if best is None or d < best:
                best = d
                improved = True
        if best == 0:
            certified = True
            break
        if best is not None:
            stable = 0 if improved else stable + 1
            if stable >= 2:
                certified = True
                break
        nxt = []
        for v in frontier:
            for nb in _neighbors(v, budget):
                if nb not in ball:
                    ball.add(nb)
                    nxt.append(nb)
        if not nxt:
            break
        frontier = sorted(nxt, key=NormalArc._sort_key)
        radius += 1
    if best is None:
        raise BudgetExceeded("no orbit distance computable within budget %d"
                             % budget)
    if with_certificate:
        return best, certified, radius
    return best


def stable_distance_upper(phi, N, budget=64):
    """The sequence d(v, phi^n(v)) / n, n = 1..N, for the first base arc.

    Subadditivity makes every entry an upper bound for the stable
    translation distance, the last being the sharpest.  Orbits outgrow the
    coordinate budget exponentially fast for pseudo-Anosov classes, and
    then the honest answer is BudgetExceeded, not a sequence quietly
    computed at a lower depth than asked.
    """
    if N < 1:
        raise ValueError("need N >= 1")
    v = arcs_of(phi.base)[0]
    out = []
    cur = v
    for n in range(1, N + 1):
        cur = apply_mcg(phi, cur)
        if cur.coord_sum > budget:
            raise BudgetExceeded(
                "iterate %d of the base arc has coordinate sum %d, over the "
                "budget %d" % (n, cur.coord_sum, budget))
        out.append(Fraction(distance(v, cur, budget=budget), n))
    return out


# ---- lifting to covers ----

def lift_arc(cover, a):
    """All lifts of the arc to the cover, in cover coordinates.

    One lift per sheet of the starting endpoint; crossing a base edge moves
    between sheets by the cover's gluing permutation for that edge.  For an
    n-fold once-punctured cover this yields n pairwise disjoint arcs.
    """
    if a.base != cover.base:
        raise BaseMismatch("arc does not live on the cover's base")
    if a.along is not None:
        return sorted((NormalArc._make(cover.total, {}, {}, {lbl: 1})
                       for lbl in cover.edge_lifts(a.along)),
                      key=NormalArc._sort_key)
    base = cover.base
    w, c, _ = a._dicts()
    steps = _arc_walk(base, w, c)
    out = []
    for sheet0 in range(cover.degree):
        wc = {}
        cc = {}
        sheet = sheet0
        for step in steps:
            if step[0] == "corner":
                t, k = step[1]
                key = (cover.lift_id(t, sheet), k)
                cc[key] = cc.get(key, 0) + 1
                continue
            _, e, slot = step
            smaller, _ = base.edges[e]
            sigma = cover.perms[e]
            if slot == smaller:
                lbl = cover.edge_lifts(e)[sheet]
                sheet = sigma[sheet]
            else:
                sheet = sigma.index(sheet)
                lbl = cover.edge_lifts(e)[sheet]
            wc[lbl] = wc.get(lbl, 0) + 1
        out.append(NormalArc._make(cover.total, wc, cc, {}))
    return sorted(out, key=NormalArc._sort_key)


# ---- slopes on the standard torus ----

def slope_arc(base, s):
    """The arc of a slope on the standard once-punctured torus.

    Edges 0, 1, 2 run in the lattice directions u, v, u + v and carry the
    slopes 0/1, 1/0, 1/1; any other slope p/q is the straight segment from
    the origin in direction q u + p v, walked cell by cell through the
    triangulated plane with exact arithmetic.
    """
    if base != once_punctured_torus():
        raise BaseMismatch("slopes live on the standard torus triangulation")
    if not isinstance(s, Slope):
        s = Slope.parse(str(s))
    special = {Slope(0, 1): 0, Slope(1, 0): 1, Slope(1, 1): 2}
    if s in special:
        return NormalArc._make(base, {}, {}, {special[s]: 1})

    a, b = s.q, s.p              # direction (a, b) in the (u, v) frame
    events = []
    for i in range(1, a):
        events.append((Fraction(i, a), "v", i))
    lo, hi = sorted((0, b))
    for j in range(lo + 1, hi):
        events.append((Fraction(j, b), "h", j))
    lo, hi = sorted((0, b - a))
    for k in range(lo + 1, hi):
        events.append((Fraction(k, b - a), "d", k))
    events.sort()

    # grid families: horizontals are copies of edge 0, verticals of edge 1,
    # diagonals y - x = const of edge 2
    edge_of = {"h": 0, "v": 1, "d": 2}
    w = {}
    for _t, kind, _n in events:
        e = edge_of[kind]
        w[e] = w.get(e, 0) + 1

    local_a = {(0, 0): 0, (1, 0): 1, (1, 1): 2}
    local_b = {(0, 0): 0, (1, 1): 1, (0, 1): 2}
    c = {}
    for (s1, k1, n1), (s2, k2, n2) in zip(events, events[1:]):
        if k1 == k2:
            raise NotAnArc("straight segment crossed two %s lines in a row"
                           % k1)
        corner = _line_meet(k1, n1, k2, n2)
        xm = Fraction(a) * (s1 + s2) / 2
        ym = Fraction(b) * (s1 + s2) / 2
        cx = xm.numerator // xm.denominator
        cy = ym.numerator // ym.denominator
        rel = (corner[0] - cx, corner[1] - cy)
        if (ym - cy) < (xm - cx):
            tri, k = 0, local_a[rel]
        else:
            tri, k = 1, local_b[rel]
        c[(tri, k)] = c.get((tri, k), 0) + 1
    return NormalArc._make(base, w, c, {})


def _line_meet(k1, n1, k2, n2):
    """Lattice point where lines x=n ('v'), y=n ('h'), y-x=n ('d') meet."""
    kinds = {k1: n1, k2: n2}
    if "v" in kinds and "h" in kinds:
        return (kinds["v"], kinds["h"])
    if "v" in kinds and "d" in kinds:
        return (kinds["v"], kinds["v"] + kinds["d"])
    return (kinds["h"] - kinds["d"], kinds["h"])


def arc_slope(a):
    """The slope of an arc on the standard once-punctured torus."""
    if a.base != once_punctured_torus():
        raise BaseMismatch("slopes live on the standard torus triangulation")
    if a.along is not None:
        return {0: Slope(0, 1), 1: Slope(1, 0), 2: Slope(1, 1)}[a.along]
    w0, w1, w2 = a.edge_weights
    q = w1 + 1
    p_abs = w0 + 1
    if abs(q - p_abs) == w2 + 1:
        return Slope(p_abs, q)
    if q + p_abs == w2 + 1:
        return Slope(-p_abs, q)
    raise NotAnArc("weights %r are not a slope triple" % (a.edge_weights,))
