import numpy as np
import pytest

from cusplab import errors
from cusplab.surface import (
    IdealTriangulation,
    Relabeling,
    build_cover,
    build_triangulation,
    canonical_form,
    cover_from_text,
    cover_to_text,
    once_punctured_torus,
)


def twice_punctured_torus():
    """Square torus with a second puncture at the centre of the square.

    Four triangles around the centre puncture B, whose spokes join B to the
    lattice puncture A; the two side edges of the square survive as A--A
    edges.  chi = -2.
    """
    pairs = [((0, 0), (2, 0)), ((1, 0), (3, 0)),
             ((0, 1), (1, 2)), ((1, 1), (2, 2)),
             ((2, 1), (3, 2)), ((3, 1), (0, 2))]
    return IdealTriangulation.from_gluings(pairs, name="s12", preferred=(0, 0))


def thrice_punctured_sphere():
    pairs = [((0, 0), (0, 1)), ((0, 2), (1, 0)), ((1, 1), (1, 2))]
    return IdealTriangulation.from_gluings(pairs, name="s03")


class TestBasics:

    def test_once_punctured_torus(self):
        s = once_punctured_torus()
        assert s.num_triangles == 2
        assert s.num_edges == 3
        assert s.chi == -1
        assert len(s.punctures) == 1
        assert len(s.punctures[0]) == 6
        assert s.edges == {0: ((0, 0), (1, 1)), 1: ((0, 1), (1, 2)),
                           2: ((0, 2), (1, 0))}
        assert s.edge_labels == (0, 1, 2)
        assert [s.edge_label(0, k) for k in range(3)] == [0, 1, 2]
        assert [s.edge_label(1, k) for k in range(3)] == [2, 0, 1]

    def test_build_triangulation_alias(self):
        s = build_triangulation(
            [((0, 0), (1, 1)), ((0, 1), (1, 2)), ((0, 2), (1, 0))], name="s11")
        assert s == once_punctured_torus()

    def test_puncture_walk_covers_link(self):
        s = once_punctured_torus()
        walk = s.puncture_walk((0, 0))
        assert walk == [(0, 0), (1, 2), (0, 2), (1, 1), (0, 1), (1, 0)]

    def test_twice_punctured_torus(self):
        s = twice_punctured_torus()
        assert s.chi == -2
        assert sorted(len(p) for p in s.punctures) == [4, 8]
        # preferred puncture is the lattice one, of valence 8
        assert len(s.punctures[s.preferred]) == 8
        assert s.puncture_walk((0, 2)) == [(0, 2), (3, 2), (2, 2), (1, 2)]

    def test_edge_punctures(self):
        s = twice_punctured_torus()
        A, B = s.preferred, 1 - s.preferred
        ends = [s.edge_punctures(e) for e in range(6)]
        assert ends[0] == (A, A)
        assert ends[3] == (A, A)
        assert sorted(ends.count(x) for x in {(A, A), (A, B), (B, A)}) == [1, 2, 3]

    def test_thrice_punctured_sphere(self):
        s = thrice_punctured_sphere()
        assert s.chi == -1
        assert len(s.punctures) == 3


class TestValidation:

    def test_asymmetric_gluing(self):
        glued = [(1, 1), (1, 2), (1, 0), (0, 2), (0, 0), (0, 1)]
        glued[3] = (0, 1)
        with pytest.raises(errors.NonInvolution):
            IdealTriangulation(glued)

    def test_fixed_point(self):
        with pytest.raises(errors.NonInvolution):
            IdealTriangulation.from_gluings(
                [((0, 0), (0, 0)), ((0, 1), (1, 0)), ((0, 2), (1, 1)),
                 ((1, 2), (1, 2))])

    def test_slot_glued_twice(self):
        with pytest.raises(errors.NonInvolution):
            IdealTriangulation.from_gluings(
                [((0, 0), (1, 1)), ((0, 0), (1, 2)), ((0, 2), (1, 0))])

    def test_missing_slot(self):
        with pytest.raises(errors.NonInvolution):
            IdealTriangulation.from_gluings([((0, 0), (1, 1)), ((0, 1), (1, 2))])

    def test_disconnected(self):
        pairs = [((0, 0), (1, 1)), ((0, 1), (1, 2)), ((0, 2), (1, 0)),
                 ((2, 0), (3, 1)), ((2, 1), (3, 2)), ((2, 2), (3, 0))]
        with pytest.raises(errors.Disconnected):
            IdealTriangulation.from_gluings(pairs)

    def test_nonorientable_rejected(self):
        pairs = [((0, 0), (1, 1)), ((0, 1), (1, 2)), ((0, 2), (1, 0))]
        with pytest.raises(errors.NonOrientable):
            IdealTriangulation.from_gluings(pairs,
                                            reversed_pairs=[pairs[1]])

    def test_reversed_gluings_normalised(self):
        # the standard torus table with triangle 1 reflected by hand; all
        # three gluings become orientation-reversing and normalisation must
        # recover the standard table
        pairs = [((0, 0), (1, 1)), ((0, 1), (1, 0)), ((0, 2), (1, 2))]
        s = IdealTriangulation.from_gluings(pairs, reversed_pairs=pairs)
        assert s == once_punctured_torus()


class TestTextFormat:

    def test_round_trip(self):
        for s in (once_punctured_torus(), twice_punctured_torus()):
            text = s.to_text()
            again = IdealTriangulation.from_text(text)
            assert again == s
            assert again.to_text() == text

    def test_exact_layout(self):
        assert once_punctured_torus().to_text() == (
            "surface s11 preferred_puncture p0\n"
            "tri 0: 1.1 1.2 1.0\n"
            "tri 1: 0.2 0.0 0.1\n")

    def test_comments_and_blank_lines(self):
        text = ("# a torus\n\nsurface s11 preferred_puncture p0\n"
                "tri 0: 1.1 1.2 1.0  # fan\n"
                "tri 1: 0.2 0.0 0.1\n")
        assert IdealTriangulation.from_text(text) == once_punctured_torus()

    @pytest.mark.parametrize("text", [
        "tri 0: 1.1 1.2 1.0",
        "surface x preferred_puncture q0\ntri 0: 1.1 1.2 1.0\ntri 1: 0.2 0.0 0.1",
        "surface x preferred_puncture p7\ntri 0: 1.1 1.2 1.0\ntri 1: 0.2 0.0 0.1",
        "surface x preferred_puncture p0\ntri 0: 1.1 1.2\ntri 1: 0.2 0.0 0.1",
        "surface x preferred_puncture p0\ntri 0: 1.1 1.2 1.0\ntri 2: 0.2 0.0 0.1",
        "surface x preferred_puncture p0\nwhat 0: 1.1 1.2 1.0",
    ])
    def test_bad_files(self, text):
        with pytest.raises(errors.BadSurfaceFile):
            IdealTriangulation.from_text(text)


class TestFlips:

    def test_not_flippable(self):
        s = thrice_punctured_sphere()
        with pytest.raises(errors.NotFlippable):
            s.flip(0)

    def test_flip_preserves_invariants(self):
        s = twice_punctured_torus()
        t, rec = s.flip(0)
        assert t.chi == s.chi
        assert len(t.punctures) == len(s.punctures)
        assert t.num_edges == s.num_edges
        assert rec.edge == 0
        assert rec.new_edge == 6
        assert rec.sides.keys() == {"A", "B", "C", "D"}

    def test_flip_uses_fresh_label(self):
        s = twice_punctured_torus()
        t, rec = s.flip(0)
        assert 0 not in t.edges
        assert t.edge_labels == (1, 2, 3, 4, 5, 6)
        assert t.edge_slots(rec.new_edge)
        # the four sides keep their labels and their gluing partners
        for side in "ABCD":
            assert rec.sides[side] in t.edges

    def test_flip_moves_edge_between_punctures(self):
        # the quad around the bottom A--A edge has B at both off-diagonal
        # corners, so the flipped edge joins B to B
        s = twice_punctured_torus()
        A = s.preferred
        assert s.edge_punctures(0) == (A, A)
        t, rec = s.flip(0)
        # puncture indices may reorder across a flip; the preferred marker
        # tracks the lattice puncture, and the new edge avoids it
        B = 1 - t.preferred
        assert t.edge_punctures(rec.new_edge) == (B, B)

    def test_relabel_edge(self):
        s = once_punctured_torus()
        t = s.relabel_edge(2, 9)
        assert t.edge_labels == (0, 1, 9)
        assert t.edge_slots(9) == s.edge_slots(2)
        assert t.relabel_edge(9, 2) == s
        with pytest.raises(errors.NonInvolution):
            s.relabel_edge(7, 8)
        with pytest.raises(errors.NonInvolution):
            s.relabel_edge(0, 1)

    def test_double_flip_is_relabelled_identity(self):
        for s in (once_punctured_torus(), twice_punctured_torus()):
            for e in s.edge_labels:
                t1, rec1 = s.flip(e)
                t2, rec2 = t1.flip(rec1.new_edge)
                back = rec1.inverse_relabeling(s.num_triangles).apply(t2)
                assert back.relabel_edge(rec2.new_edge, e) == s

    def test_random_flip_walk_and_unwind(self):
        rng = np.random.default_rng(7)
        s = twice_punctured_torus()
        stack = []
        cur = s
        while len(stack) < 40:
            labels = cur.edge_labels
            e = labels[int(rng.integers(len(labels)))]
            try:
                nxt, rec = cur.flip(e)
            except errors.NotFlippable:
                continue
            assert nxt.chi == s.chi
            assert len(nxt.punctures) == len(s.punctures)
            stack.append((cur, rec))
            cur = nxt
        while stack:
            prev, rec = stack.pop()
            cur, rec2 = cur.flip(rec.new_edge)
            cur = rec.inverse_relabeling(cur.num_triangles).apply(cur)
            cur = cur.relabel_edge(rec2.new_edge, rec.edge)
            assert cur == prev


class TestRelabeling:

    def test_apply_and_inverse(self):
        s = twice_punctured_torus()
        r = Relabeling(perm=(2, 0, 3, 1), rot=(1, 2, 0, 1))
        t = r.apply(s)
        assert t.chi == s.chi
        assert r.inverse().apply(t) == s
        assert r.then(r.inverse()).apply(s) == s

    def test_rotation_automorphism_of_torus(self):
        # rotating both plane triangles one step is the order three symmetry
        # cycling the three slopes
        s = once_punctured_torus()
        r = Relabeling(perm=(0, 1), rot=(1, 1))
        assert r.is_automorphism(s)
        assert r.edge_map(s) == {0: 1, 1: 2, 2: 0}
        assert r.then(r).then(r).apply(s) == s

    def test_non_automorphism(self):
        s = once_punctured_torus()
        assert not Relabeling(perm=(1, 0), rot=(0, 0)).is_automorphism(s)


class TestCanonicalForm:

    def test_relabelled_copies_match(self):
        s = twice_punctured_torus()
        r = Relabeling(perm=(3, 1, 0, 2), rot=(2, 0, 1, 2))
        assert s.is_isomorphic_to(r.apply(s))

    def test_different_surfaces_differ(self):
        assert not once_punctured_torus().is_isomorphic_to(
            thrice_punctured_sphere())

    def test_puncture_marking(self):
        s = twice_punctured_torus()
        other = IdealTriangulation(
            [s.glued_slot(t, k) for t in range(4) for k in range(3)],
            preferred=1 - s.preferred)
        assert not s.is_isomorphic_to(other)
        assert s.is_isomorphic_to(other, mark_puncture=False)

    def test_mirror(self):
        s = twice_punctured_torus()
        m = s.mirrored()
        assert m.mirrored() == s
        assert s.is_isomorphic_to(m)
        assert s.canonical_key() == m.canonical_key()

    def test_canonical_form_alias(self):
        s = twice_punctured_torus()
        r = Relabeling(perm=(1, 3, 2, 0), rot=(0, 2, 1, 0))
        assert canonical_form(s) == canonical_form(r.apply(s))
        assert canonical_form(s) != canonical_form(once_punctured_torus())


class TestCovers:

    def test_degree_three_cover_of_torus(self):
        base = once_punctured_torus()
        cover = build_cover(base, {0: (1, 0, 2), 1: (0, 2, 1), 2: (0, 1, 2)})
        assert cover.total.num_triangles == 6
        assert cover.total.chi == -3
        assert len(cover.total.punctures) == 1
        lifts = cover.edge_lifts(0)
        assert len(set(lifts)) == 3
        assert cover.total.num_edges == 9

    def test_projection_indices(self):
        base = once_punctured_torus()
        cover = build_cover(base, [(1, 2, 0), (0, 1, 2), (0, 1, 2)])
        for t in range(2):
            for i in range(3):
                assert cover.project(cover.lift_id(t, i)) == (t, i)

    def test_intransitive(self):
        base = once_punctured_torus()
        with pytest.raises(errors.Intransitive):
            build_cover(base, [(0, 1), (0, 1), (0, 1)])
        # the same 3-cycle on every edge generates a transitive group but
        # still tears the cover into three pieces
        with pytest.raises(errors.Intransitive):
            build_cover(base, [(1, 2, 0), (1, 2, 0), (1, 2, 0)])

    def test_base_mismatch(self):
        base = once_punctured_torus()
        with pytest.raises(errors.BaseMismatch):
            build_cover(base, {0: (1, 0), 1: (0, 1)})
        with pytest.raises(errors.BaseMismatch):
            build_cover(base, {0: (1, 1), 1: (0, 1), 2: (0, 1)})
        with pytest.raises(errors.BaseMismatch):
            build_cover(base, {0: (1, 0), 1: (0, 1), 2: (0, 1, 2)})

    def test_cover_text_round_trip(self):
        base = once_punctured_torus()
        cover = build_cover(base, {0: (1, 0, 2), 1: (0, 2, 1), 2: (0, 1, 2)})
        text = cover_to_text(cover)
        again = cover_from_text(text)
        assert again.total == cover.total
        assert again.perms == cover.perms
        assert cover_to_text(again) == text

    def test_preferred_puncture_lifts_sheet_zero(self):
        base = twice_punctured_torus()
        cover = build_cover(base, {e: (1, 0) for e in range(6)})
        t0, k0 = base.punctures[base.preferred][0]
        lifted = (cover.lift_id(t0, 0), k0)
        assert cover.total.puncture_of(lifted) == cover.total.preferred
