"""Ideal triangulations of punctured surfaces.

A surface is presented as T oriented triangles with vertices 0, 1, 2 in
counterclockwise order and all 3T edge slots glued in pairs.  Slot s of a
triangle is the edge running from vertex s to vertex s + 1 (mod 3).  Gluing
slot (t, a) to slot (u, b) identifies the two edges reversing direction,

    vertex a   of t  ~  vertex b+1 of u,
    vertex a+1 of t  ~  vertex b   of u,

which is the unique convention compatible with both triangles being
counterclockwise.  Gluing data containing orientation-reversing
identifications is accepted when the glued surface is orientable: the
offending triangles are reflected and the data rebuilt in the convention
above.  Genuinely non-orientable data is rejected.

Punctures are the orbits of triangle corners under the gluings; every vertex
of every triangle is a puncture (the triangulations are ideal).  One puncture
is always marked as preferred; the arc machinery keeps endpoints there.

Edges carry stable integer labels.  A freshly built triangulation numbers its
edges 0 .. E-1 by their smallest slot in lexicographic order, the convention
of the text format.  A flip keeps the labels of the four sides of its
quadrilateral and gives the new diagonal a fresh label (one past the current
maximum), recorded in the FlipRecord, so weight vectors keyed by label stay
unambiguous along a flip path.
"""

from dataclasses import dataclass

from .errors import (
    BadSurfaceFile,
    BaseMismatch,
    Disconnected,
    Intransitive,
    NonInvolution,
    NonOrientable,
    NotFlippable,
)

_REFLECT = (0, 2, 1)  # vertex relabelling that reverses one triangle


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        self.parent[self.find(x)] = self.find(y)

    def classes(self):
        groups = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return [sorted(g) for g in groups.values()]


class IdealTriangulation:
    """Immutable ideal triangulation of a connected oriented punctured surface.

    Construct with `build_triangulation`/`from_gluings`, `from_text`, or a
    ready slot table: entry 3t + s of `glued` is the slot paired with (t, s).
    All derived data (edges, punctures, Euler characteristic) is computed up
    front; instances never mutate, and flips return new instances.

    `edges` maps each edge label to its pair of slots, lexicographically
    smaller slot first; that slot is the edge's oriented representative.
    """

    def __init__(self, glued, name="surface", preferred=None, edge_of_slot=None):
        glued = tuple((int(u), int(b)) for u, b in glued)
        if len(glued) == 0 or len(glued) % 3:
            raise NonInvolution(
                "slot table has %d entries, not a positive multiple of 3" % len(glued))
        self._glued = glued
        self.num_triangles = len(glued) // 3
        self.name = str(name)
        self._check_involution()
        self._check_connected()
        self._build_edges(edge_of_slot)
        self._build_punctures()
        self._set_preferred(preferred)
        self._ckey = {}

    # ---- construction checks ----

    def _check_involution(self):
        T = self.num_triangles
        for idx, (u, b) in enumerate(self._glued):
            t, a = divmod(idx, 3)
            if not (0 <= u < T and 0 <= b < 3):
                raise NonInvolution("slot (%d,%d) glued to nonexistent (%d,%d)"
                                    % (t, a, u, b))
            if (u, b) == (t, a):
                raise NonInvolution("slot (%d,%d) glued to itself" % (t, a))
            if self._glued[3 * u + b] != (t, a):
                raise NonInvolution("gluing of (%d,%d) and (%d,%d) is not symmetric"
                                    % (t, a, u, b))

    def _check_connected(self):
        uf = _UnionFind(range(self.num_triangles))
        for idx, (u, _) in enumerate(self._glued):
            uf.union(idx // 3, u)
        if len(uf.classes()) > 1:
            raise Disconnected("gluing data describes %d components"
                               % len(uf.classes()))

    def _build_edges(self, edge_of_slot):
        reps = []
        for idx, (u, b) in enumerate(self._glued):
            if idx < 3 * u + b:
                reps.append((divmod(idx, 3), (u, b)))
        if edge_of_slot is None:
            table = [None] * (3 * self.num_triangles)
            for e, ((t, a), (u, b)) in enumerate(reps):
                table[3 * t + a] = e
                table[3 * u + b] = e
            self._edge_of_slot = tuple(table)
            self.edges = {e: pair for e, pair in enumerate(reps)}
        else:
            table = tuple(int(x) for x in edge_of_slot)
            if len(table) != 3 * self.num_triangles:
                raise NonInvolution("edge label table has wrong length")
            by_label = {}
            for idx, e in enumerate(table):
                by_label.setdefault(e, []).append(divmod(idx, 3))
            for e, slots in sorted(by_label.items()):
                (t, a) = slots[0]
                if len(slots) != 2 or self._glued[3 * t + a] != slots[1]:
                    raise NonInvolution("edge label %d does not match a gluing" % e)
            self._edge_of_slot = table
            self.edges = {e: tuple(slots) for e, slots in sorted(by_label.items())}

    def _build_punctures(self):
        corners = [(t, k) for t in range(self.num_triangles) for k in range(3)]
        uf = _UnionFind(corners)
        for (t, a), (u, b) in self.edges.values():
            uf.union((t, a), (u, (b + 1) % 3))
            uf.union((t, (a + 1) % 3), (u, b))
        self.punctures = tuple(sorted(tuple(c) for c in
                                      (map(tuple, g) for g in uf.classes())))
        self._corner_puncture = {}
        for i, orbit in enumerate(self.punctures):
            for c in orbit:
                self._corner_puncture[c] = i

    def _set_preferred(self, preferred):
        if preferred is None:
            self.preferred = 0
        elif isinstance(preferred, tuple):
            self.preferred = self._corner_puncture[preferred]
        else:
            if not 0 <= int(preferred) < len(self.punctures):
                raise BadSurfaceFile("no puncture p%s" % preferred)
            self.preferred = int(preferred)

    # ---- basic queries ----

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def chi(self):
        return self.num_triangles - self.num_edges

    @property
    def edge_labels(self):
        return tuple(sorted(self.edges))

    def glued_slot(self, t, s):
        return self._glued[3 * t + s]

    def edge_label(self, t, s):
        return self._edge_of_slot[3 * t + s]

    def edge_slots(self, e):
        return self.edges[e]

    def puncture_of(self, corner):
        return self._corner_puncture[corner]

    def edge_punctures(self, e):
        """Punctures at the tail and head of edge e (slot direction)."""
        (t, a), _ = self.edges[e]
        return (self.puncture_of((t, a)), self.puncture_of((t, (a + 1) % 3)))

    def corners(self):
        return [(t, k) for t in range(self.num_triangles) for k in range(3)]

    def puncture_walk(self, corner):
        """The corners around the puncture of `corner`, in cyclic order.

        From corner (t, c) the walk crosses the outgoing slot c and lands in
        the corner of the neighbouring triangle at the same puncture point.
        """
        t, c = corner
        walk = [corner]
        while True:
            u, b = self.glued_slot(t, c)
            t, c = u, (b + 1) % 3
            if (t, c) == corner:
                return walk
            walk.append((t, c))
            assert len(walk) <= 3 * self.num_triangles

    def __eq__(self, other):
        return (isinstance(other, IdealTriangulation)
                and self._glued == other._glued
                and self._edge_of_slot == other._edge_of_slot
                and self.preferred == other.preferred)

    def __hash__(self):
        return hash((self._glued, self._edge_of_slot, self.preferred))

    def __repr__(self):
        return "<IdealTriangulation %s: %d triangles, chi=%d, %d punctures>" % (
            self.name, self.num_triangles, self.chi, len(self.punctures))

    # ---- flips ----

    def flip(self, e):
        """Replace edge e by the other diagonal of the quadrilateral around it.

        Returns (triangulation, FlipRecord).  The quadrilateral has corners
        P, Q, R, S in counterclockwise order with the old diagonal Q--S and
        the new one P--R; its sides A: P->Q, B: Q->R, C: R->S, D: S->P keep
        their edge labels and the new diagonal receives a fresh label,
        recorded as `new_edge`.  Raises NotFlippable when both sides of e
        lie on the same triangle.
        """
        if e not in self.edges:
            raise NotFlippable("no edge labelled %r" % (e,))
        (t, a), (u, b) = self.edges[e]
        if t == u:
            raise NotFlippable("edge %d has triangle %d on both sides" % (e, t))
        fresh = max(self.edges) + 1
        A = (t, (a + 2) % 3)
        B = (u, (b + 1) % 3)
        C = (u, (b + 2) % 3)
        D = (t, (a + 1) % 3)
        # new triangles reuse the ids: t' = (P,Q,R), u' = (R,S,P)
        moves = {A: (t, 0), B: (t, 1), C: (u, 0), D: (u, 1)}

        glued = {}
        labels = {}
        for idx in range(3 * self.num_triangles):
            s = divmod(idx, 3)
            if s[0] in (t, u):
                continue
            p = self._glued[idx]
            glued[s] = moves.get(p, p)
            labels[s] = self._edge_of_slot[idx]
        for side, ns in moves.items():
            p = self._glued[3 * side[0] + side[1]]
            glued[ns] = moves.get(p, p)
            labels[ns] = self._edge_of_slot[3 * side[0] + side[1]]
        glued[(t, 2)] = (u, 2)
        glued[(u, 2)] = (t, 2)
        labels[(t, 2)] = fresh
        labels[(u, 2)] = fresh

        order = [(w, s) for w in range(self.num_triangles) for s in range(3)]
        record = FlipRecord(
            edge=e,
            new_edge=fresh,
            old_slots=((t, a), (u, b)),
            sides={"A": self._edge_of_slot[3 * A[0] + A[1]],
                   "B": self._edge_of_slot[3 * B[0] + B[1]],
                   "C": self._edge_of_slot[3 * C[0] + C[1]],
                   "D": self._edge_of_slot[3 * D[0] + D[1]]},
            corners_old={"P": ((t, (a + 2) % 3),),
                         "Q": ((t, a), (u, (b + 1) % 3)),
                         "R": ((u, (b + 2) % 3),),
                         "S": ((t, (a + 1) % 3), (u, b))},
            corners_new={"P": ((t, 0), (u, 2)),
                         "Q": ((t, 1),),
                         "R": ((t, 2), (u, 0)),
                         "S": ((u, 1),)},
            slot_moves=dict(moves))

        corner_map = record.corner_forward_map()
        old_pref = self.punctures[self.preferred][0]
        new_pref = corner_map.get(old_pref, old_pref)
        new_tri = IdealTriangulation(
            tuple(glued[s] for s in order), name=self.name,
            preferred=new_pref, edge_of_slot=tuple(labels[s] for s in order))
        return new_tri, record

    def relabel_edge(self, old, new):
        """The same triangulation with edge `old` relabelled `new`."""
        if old not in self.edges:
            raise NonInvolution("no edge labelled %r" % (old,))
        if new != old and new in self.edges:
            raise NonInvolution("label %r already in use" % (new,))
        table = tuple(new if x == old else x for x in self._edge_of_slot)
        t0, k0 = self.punctures[self.preferred][0]
        return IdealTriangulation(self._glued, name=self.name,
                                  preferred=(t0, k0), edge_of_slot=table)

    # ---- orientation reversal and canonical form ----

    def mirrored(self):
        """The same surface with the opposite orientation.

        Every triangle is reflected through the swap of vertices 1 and 2;
        slot s becomes slot 2 - s and all gluings stay in convention.
        """
        glued = {}
        labels = {}
        for idx, (u, b) in enumerate(self._glued):
            t, s = divmod(idx, 3)
            glued[(t, 2 - s)] = (u, 2 - b)
            labels[(t, 2 - s)] = self._edge_of_slot[idx]
        order = [(w, s) for w in range(self.num_triangles) for s in range(3)]
        t0, k0 = self.punctures[self.preferred][0]
        return IdealTriangulation(
            tuple(glued[s] for s in order), name=self.name,
            preferred=(t0, _REFLECT[k0]),
            edge_of_slot=tuple(labels[s] for s in order))

    def _flag_key(self, t0, r0, mark_puncture):
        # relabel by search order from the starting flag; rho[t] shifts slots,
        # new slot s of t is old slot (s + rho[t]) % 3
        rho = {t0: r0}
        ids = {t0: 0}
        order = [t0]
        rows = []
        for t in order:
            r = rho[t]
            row = []
            for s in range(3):
                u, b = self.glued_slot(t, (s + r) % 3)
                if u not in ids:
                    ids[u] = len(order)
                    rho[u] = b
                    order.append(u)
                row.append((ids[u], (b - rho[u]) % 3))
            rows.append(tuple(row))
        key = (tuple(rows),)
        if mark_puncture:
            mask = tuple(tuple(int(self.puncture_of((t, (k + rho[t]) % 3))
                               == self.preferred) for k in range(3))
                         for t in order)
            key += (mask,)
        return key

    def _oriented_key(self, mark_puncture):
        return min(self._flag_key(t0, r0, mark_puncture)
                   for t0 in range(self.num_triangles) for r0 in range(3))

    def canonical_key(self, mark_puncture=True, mirror=True):
        """Hashable invariant, equal exactly for isomorphic triangulations.

        With mark_puncture the isomorphisms must carry the preferred
        puncture to the preferred puncture; with mirror they may reverse
        orientation.  The key is the minimal breadth-first re-encoding over
        all starting flags, so it doubles as a canonical labeling.
        """
        k = (bool(mark_puncture), bool(mirror))
        if k not in self._ckey:
            key = self._oriented_key(mark_puncture)
            if mirror:
                key = min(key, self.mirrored()._oriented_key(mark_puncture))
            self._ckey[k] = key
        return self._ckey[k]

    def is_isomorphic_to(self, other, mark_puncture=True, mirror=True):
        return (self.canonical_key(mark_puncture, mirror)
                == other.canonical_key(mark_puncture, mirror))

    # ---- serialization ----

    def to_text(self):
        lines = ["surface %s preferred_puncture p%d" % (self.name, self.preferred)]
        for t in range(self.num_triangles):
            parts = " ".join("%d.%d" % self.glued_slot(t, s) for s in range(3))
            lines.append("tri %d: %s" % (t, parts))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        header = None
        rows = {}
        for ln, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if tok[0] == "surface":
                if header is not None or len(tok) != 4 or tok[2] != "preferred_puncture":
                    raise BadSurfaceFile("line %d: bad surface header" % ln)
                header = (tok[1], tok[3])
            elif tok[0] == "tri":
                if header is None or len(tok) != 5 or not tok[1].endswith(":"):
                    raise BadSurfaceFile("line %d: bad triangle line" % ln)
                try:
                    t = int(tok[1][:-1])
                    row = []
                    for part in tok[2:]:
                        u, b = part.split(".")
                        row.append((int(u), int(b)))
                except ValueError:
                    raise BadSurfaceFile("line %d: bad slot entry" % ln)
                if t in rows:
                    raise BadSurfaceFile("line %d: triangle %d repeated" % (ln, t))
                rows[t] = row
            else:
                raise BadSurfaceFile("line %d: unexpected %r" % (ln, tok[0]))
        if header is None:
            raise BadSurfaceFile("missing surface header")
        if sorted(rows) != list(range(len(rows))):
            raise BadSurfaceFile("triangle ids are not 0..%d" % (len(rows) - 1))
        name, pid = header
        if not (pid.startswith("p") and pid[1:].isdigit()):
            raise BadSurfaceFile("bad puncture id %r" % pid)
        glued = [rows[t][s] for t in range(len(rows)) for s in range(3)]
        return cls(glued, name=name, preferred=int(pid[1:]))

    @classmethod
    def from_gluings(cls, pairs, name="surface", preferred=None, reversed_pairs=()):
        """Build from a list of slot pairs ((t, a), (u, b)).

        Pairs listed in `reversed_pairs` are orientation-reversing
        identifications (vertex a of t matching vertex b of u); the data is
        normalised by reflecting triangles where possible and rejected with
        NonOrientable where not.
        """
        pairs = [((int(t), int(a)), (int(u), int(b)))
                 for (t, a), (u, b) in pairs]
        rev = {frozenset(p) for p in
               ((tuple(x), tuple(y)) for x, y in reversed_pairs)}
        unknown = rev - {frozenset(p) for p in pairs}
        if unknown:
            raise NonInvolution("reversed_pairs contains unknown gluings")
        tris = {t for p in pairs for (t, _) in p}
        if tris != set(range(len(tris))):
            raise NonInvolution("triangle ids are not consecutive from 0")
        if rev:
            pairs, preferred = cls._normalize_orientation(pairs, rev, len(tris),
                                                          preferred)
        glued = {}
        for x, y in pairs:
            for s, p in ((x, y), (y, x)):
                if s in glued:
                    raise NonInvolution("slot (%d,%d) glued twice" % s)
                glued[s] = p
        order = [(t, s) for t in range(len(tris)) for s in range(3)]
        missing = [s for s in order if s not in glued]
        if missing:
            raise NonInvolution("slot (%d,%d) is not glued" % missing[0])
        return cls(tuple(glued[s] for s in order), name=name, preferred=preferred)

    @staticmethod
    def _normalize_orientation(pairs, rev, T, preferred):
        # 2-colour the triangles: a reversing gluing joins opposite colours
        colour = {}
        adj = {t: [] for t in range(T)}
        for x, y in pairs:
            flip = frozenset((x, y)) in rev
            adj[x[0]].append((y[0], flip))
            adj[y[0]].append((x[0], flip))
        for start in range(T):
            if start in colour:
                continue
            colour[start] = 0
            queue = [start]
            for t in queue:
                for nbr, flip in adj[t]:
                    want = colour[t] ^ flip
                    if nbr not in colour:
                        colour[nbr] = want
                        queue.append(nbr)
                    elif colour[nbr] != want:
                        raise NonOrientable("gluing data admits no orientation")

        def fix(slot):
            t, s = slot
            return (t, 2 - s) if colour[t] else slot

        fixed = []
        for x, y in pairs:
            bit = frozenset((x, y)) in rev
            assert bit == (colour[x[0]] ^ colour[y[0]])
            fixed.append((fix(x), fix(y)))
        if isinstance(preferred, tuple):
            t0, k0 = preferred
            if colour[t0]:
                preferred = (t0, _REFLECT[k0])
        return fixed, preferred


def build_triangulation(pairs, name="surface", preferred=None, reversed_pairs=()):
    """Validated triangulation from a gluing table; see from_gluings."""
    return IdealTriangulation.from_gluings(pairs, name=name, preferred=preferred,
                                           reversed_pairs=reversed_pairs)


def find_relabelings(tri, target, match_labels=True, match_preferred=False):
    """All relabelings carrying tri onto target, slot table and labels alike.

    A relabeling is determined by the image of one flag, so the search tries
    all 3T seeds and keeps those that propagate consistently.  With
    match_labels each edge label must land on itself; with match_preferred
    the preferred puncture must be carried to the preferred puncture.
    Results are sorted by (perm, rot).
    """
    out = []
    T = tri.num_triangles
    if T != target.num_triangles:
        return out
    for t0 in range(T):
        for r0 in range(3):
            perm = {0: t0}
            rot = {0: r0}
            queue = [0]
            ok = True
            while queue and ok:
                x = queue.pop()
                for s in range(3):
                    y, b = tri.glued_slot(x, s)
                    iy, ib = target.glued_slot(perm[x], (s + rot[x]) % 3)
                    if y in perm:
                        if (perm[y], (b + rot[y]) % 3) != (iy, ib):
                            ok = False
                            break
                    else:
                        perm[y] = iy
                        rot[y] = (ib - b) % 3
                        queue.append(y)
            if not ok or len(perm) < T:
                continue
            cand = Relabeling(tuple(perm[t] for t in range(T)),
                              tuple(rot[t] for t in range(T)))
            image = cand.apply(tri)
            if image._glued != target._glued:
                continue
            if match_labels and image._edge_of_slot != target._edge_of_slot:
                continue
            if match_preferred and image.preferred != target.preferred:
                continue
            out.append(cand)
    return sorted(out, key=lambda r: (r.perm, r.rot))


def canonical_form(tri, mark_puncture=True, mirror=True):
    """Canonical labeling key of the triangulation; equal iff isomorphic."""
    return tri.canonical_key(mark_puncture=mark_puncture, mirror=mirror)


@dataclass(frozen=True)
class FlipRecord:
    """Everything about one flip that coordinate transport needs.

    Letters P, Q, R, S name the quadrilateral corners (counterclockwise, old
    diagonal Q--S, new diagonal P--R) and A, B, C, D its sides P->Q, Q->R,
    R->S, S->P.  `corners_old` and `corners_new` list the (triangle, vertex)
    corners sitting at each letter before and after; `sides` gives each
    side's unchanged edge label; `slot_moves` maps the old slot of each side
    to its new slot; `new_edge` is the fresh label of the new diagonal.
    """
    edge: int
    new_edge: int
    old_slots: tuple
    sides: dict
    corners_old: dict
    corners_new: dict
    slot_moves: dict

    def corner_forward_map(self):
        """Old corner -> new corner for the two flipped triangles only."""
        out = {}
        for letter, olds in self.corners_old.items():
            for c in olds:
                out[c] = self.corners_new[letter][0]
        return out

    def inverse_relabeling(self, num_triangles):
        """Relabeling that carries the double flip back to the original.

        Flipping `new_edge` in the flipped triangulation gives the original
        surface back with the two triangles trading places; this returns the
        triangle and vertex renaming that undoes that.  The second flip's
        fresh diagonal label still needs renaming to `edge` afterwards.
        """
        (t, a), (u, b) = self.old_slots
        perm = list(range(num_triangles))
        rot = [0] * num_triangles
        perm[t], rot[t] = u, (b + 1) % 3
        perm[u], rot[u] = t, (a + 1) % 3
        return Relabeling(tuple(perm), tuple(rot))


@dataclass(frozen=True)
class Relabeling:
    """Orientation-preserving renaming of triangles and vertices.

    Vertex k of triangle t becomes vertex (k + rot[t]) % 3 of triangle
    perm[t]; slots transform the same way since slot s is anchored at
    vertex s.
    """
    perm: tuple
    rot: tuple

    def slot_image(self, t, s):
        return (self.perm[t], (s + self.rot[t]) % 3)

    def corner_image(self, t, k):
        return (self.perm[t], (k + self.rot[t]) % 3)

    def inverse(self):
        n = len(self.perm)
        perm = [0] * n
        rot = [0] * n
        for t in range(n):
            perm[self.perm[t]] = t
            rot[self.perm[t]] = (-self.rot[t]) % 3
        return Relabeling(tuple(perm), tuple(rot))

    def then(self, other):
        """The composite relabeling: self first, then other."""
        perm = tuple(other.perm[p] for p in self.perm)
        rot = tuple((self.rot[t] + other.rot[self.perm[t]]) % 3
                    for t in range(len(self.perm)))
        return Relabeling(perm, rot)

    def apply(self, tri):
        glued = {}
        labels = {}
        for t in range(tri.num_triangles):
            for s in range(3):
                ns = self.slot_image(t, s)
                glued[ns] = self.slot_image(*tri.glued_slot(t, s))
                labels[ns] = tri.edge_label(t, s)
        order = [(w, s) for w in range(tri.num_triangles) for s in range(3)]
        t0, k0 = tri.punctures[tri.preferred][0]
        return IdealTriangulation(
            tuple(glued[s] for s in order), name=tri.name,
            preferred=self.corner_image(t0, k0),
            edge_of_slot=tuple(labels[s] for s in order))

    def is_automorphism(self, tri):
        for t in range(tri.num_triangles):
            for s in range(3):
                if (tri.glued_slot(*self.slot_image(t, s))
                        != self.slot_image(*tri.glued_slot(t, s))):
                    return False
        return True

    def edge_map(self, tri):
        """Induced permutation of edge labels, for an automorphism of tri."""
        out = {}
        for e, ((t, a), _) in tri.edges.items():
            out[e] = tri.edge_label(*self.slot_image(t, a))
        return out


# ---- covers ----

@dataclass(frozen=True)
class CoverMap:
    """A finite cover of a triangulated surface.

    Triangle (t, sheet i) of the cover has id t * degree + i.  `perms`
    records, per base edge label, the sheet permutation read on the oriented
    representative of the edge: crossing from the lexicographically smaller
    slot (t, a) into (u, b) carries sheet i to sheet perms[e][i].
    """
    base: IdealTriangulation
    total: IdealTriangulation
    degree: int
    perms: dict

    def lift_id(self, t, sheet):
        return t * self.degree + sheet

    def project(self, cover_tri):
        return divmod(cover_tri, self.degree)

    def edge_lifts(self, e):
        """Cover edge labels over base edge e, indexed by the (t, a) sheet."""
        (t, a), _ = self.base.edges[e]
        return tuple(self.total.edge_label(self.lift_id(t, i), a)
                     for i in range(self.degree))


def build_cover(base, perms, name=None, preferred=None):
    """Assemble the cover of `base` given one sheet permutation per edge.

    `perms` maps edge label to a tuple listing sigma(0), sigma(1), ...; see
    CoverMap for the orientation convention.  `preferred` selects the lift
    of the base preferred puncture by a cover corner; the default marks the
    sheet-0 lift of the base puncture's first corner.  Raises BaseMismatch
    for data that does not fit the base and Intransitive when the sheets do
    not form a single connected cover.
    """
    labels = sorted(base.edges)
    if not hasattr(perms, "keys"):
        perms = dict(zip(labels, perms))
    if sorted(perms) != labels:
        raise BaseMismatch("need one permutation per edge label of the base")
    table = {}
    degree = None
    for e in labels:
        sigma = tuple(int(x) for x in perms[e])
        if degree is None:
            degree = len(sigma)
        if len(sigma) != degree or sorted(sigma) != list(range(degree)):
            raise BaseMismatch("edge %d: not a permutation of 0..%d"
                               % (e, (degree or 1) - 1))
        table[e] = sigma
    if degree < 1:
        raise BaseMismatch("cover degree must be at least 1")

    glued = {}
    for e, ((t, a), (u, b)) in base.edges.items():
        sigma = table[e]
        for i in range(degree):
            ct = t * degree + i
            cu = u * degree + sigma[i]
            glued[(ct, a)] = (cu, b)
            glued[(cu, b)] = (ct, a)

    # connectivity must be judged on the assembled cover: permutations that
    # generate a transitive group can still leave the cover disconnected
    uf = _UnionFind(range(base.num_triangles * degree))
    for (ct, _), (cu, _) in glued.items():
        uf.union(ct, cu)
    if len(uf.classes()) > 1:
        raise Intransitive("gluing permutations leave the cover in %d pieces"
                           % len(uf.classes()))

    order = [(w, s) for w in range(base.num_triangles * degree) for s in range(3)]
    if preferred is None:
        t0, k0 = base.punctures[base.preferred][0]
        preferred = (t0 * degree + 0, k0)
    total = IdealTriangulation(
        tuple(glued[s] for s in order),
        name=name or "%s_cover%d" % (base.name, degree),
        preferred=preferred)
    return CoverMap(base=base, total=total, degree=degree, perms=table)


def cover_to_text(cover):
    lines = [cover.base.to_text().rstrip("\n")]
    lines.append("cover degree %d" % cover.degree)
    for e in sorted(cover.perms):
        lines.append("perm %d: %s" % (e, " ".join(str(x) for x in cover.perms[e])))
    return "\n".join(lines) + "\n"


def cover_from_text(text):
    base_lines = []
    perm_lines = []
    degree = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "cover":
            if degree is not None or len(tok) != 3 or tok[1] != "degree":
                raise BadSurfaceFile("line %d: bad cover line" % ln)
            try:
                degree = int(tok[2])
            except ValueError:
                raise BadSurfaceFile("line %d: bad cover degree" % ln)
        elif tok[0] == "perm":
            if degree is None or len(tok) < 3 or not tok[1].endswith(":"):
                raise BadSurfaceFile("line %d: bad perm line" % ln)
            try:
                e = int(tok[1][:-1])
                sigma = tuple(int(x) for x in tok[2:])
            except ValueError:
                raise BadSurfaceFile("line %d: bad perm entry" % ln)
            perm_lines.append((ln, e, sigma))
        else:
            if degree is not None:
                raise BadSurfaceFile("line %d: surface data after cover line" % ln)
            base_lines.append(raw)
    if degree is None:
        raise BadSurfaceFile("missing cover line")
    base = IdealTriangulation.from_text("\n".join(base_lines))
    perms = {}
    for ln, e, sigma in perm_lines:
        if e in perms:
            raise BadSurfaceFile("line %d: edge %d repeated" % (ln, e))
        if len(sigma) != degree:
            raise BadSurfaceFile("line %d: permutation has %d entries, need %d"
                                 % (ln, len(sigma), degree))
        perms[e] = sigma
    return build_cover(base, perms)


def once_punctured_torus(name="s11"):
    """The two-triangle ideal triangulation of the once-punctured torus.

    In the plane model with triangle 0 spanning (0, u, u+v) and triangle 1
    spanning (0, u+v, v) for the standard lattice basis u, v, the edges come
    out labelled 0, 1, 2 in the directions u, v, u+v.
    """
    return IdealTriangulation.from_gluings(
        [((0, 0), (1, 1)), ((0, 1), (1, 2)), ((0, 2), (1, 0))], name=name)
