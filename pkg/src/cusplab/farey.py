"""Slopes and distances in the Farey graph.

Every essential arc on the once-punctured torus is determined by its slope
p/q, and two arcs have disjoint representatives exactly when the slopes
satisfy |p q' - q p'| = 1.  The graph on the extended rationals with those
edges is the Farey graph; its combinatorial distance is what this module
computes, exactly, together with the action of torus monodromies on slopes
and their translation distances.

Conventions fixed here: R = [[1,1],[0,1]] and L = [[1,0],[1,1]], and a word
over {L, R} multiplies out to the left-to-right product of its letter
matrices.  Slopes are written p/q with q >= 0 in lowest terms, infinity
being 1/0.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import EmptyWord, NotPseudoAnosov

R_MATRIX = ((1, 1), (0, 1))
L_MATRIX = ((1, 0), (1, 1))


@dataclass(frozen=True)
class Slope:
    """A slope p/q in lowest terms with q >= 0; infinity is 1/0.

    Any integer pair with a nonzero entry canonicalises on construction, so
    Slope(-2, -4) == Slope(1, 2) and Slope(-3, 0) == Slope(1, 0).
    """
    p: int
    q: int = 1

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if p == 0 and q == 0:
            raise ValueError("0/0 is not a slope")
        g = gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text == "inf":
            return cls(1, 0)
        if "/" in text:
            a, b = text.split("/", 1)
            return cls(int(a), int(b))
        return cls(int(text), 1)

    @property
    def is_infinity(self):
        return self.q == 0

    def __str__(self):
        return "inf" if self.q == 0 else "%d/%d" % (self.p, self.q)


INFINITY = Slope(1, 0)


def _word_product(word):
    a, b, c, d = 1, 0, 0, 1
    for letter in word:
        if letter == "R":
            a, b, c, d = a, a + b, c, c + d
        elif letter == "L":
            a, b, c, d = a + b, b, c + d, d
        else:
            raise ValueError("monodromy letters are L and R, got %r" % letter)
    return ((a, b), (c, d))


@dataclass(frozen=True)
class Monodromy:
    """An integer matrix of determinant +1, optionally remembering a word.

    The word, when present, must multiply out to the matrix under the R and
    L conventions of this module.  Products forget the word unless both
    factors carry one.
    """
    matrix: tuple
    word: str = None

    def __post_init__(self):
        (a, b), (c, d) = self.matrix
        m = ((int(a), int(b)), (int(c), int(d)))
        if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 1:
            raise ValueError("matrix determinant is not +1")
        object.__setattr__(self, "matrix", m)
        if self.word is not None:
            if _word_product(self.word) != m:
                raise ValueError("word %r does not multiply out to the matrix"
                                 % self.word)

    @property
    def trace(self):
        return self.matrix[0][0] + self.matrix[1][1]

    @property
    def is_pseudo_anosov(self):
        return abs(self.trace) > 2

    def __mul__(self, other):
        (a, b), (c, d) = self.matrix
        (e, f), (g, h) = other.matrix
        word = None
        if self.word is not None and other.word is not None:
            word = self.word + other.word
        return Monodromy(((a * e + b * g, a * f + b * h),
                          (c * e + d * g, c * f + d * h)), word)

    def inverse(self):
        (a, b), (c, d) = self.matrix
        return Monodromy(((d, -b), (-c, a)))

    def power(self, n):
        if n < 0:
            return self.inverse().power(-n)
        out = Monodromy(((1, 0), (0, 1)), "" if self.word is not None else None)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out


def word_to_matrix(word):
    """The Monodromy of a word over {L, R}; raises EmptyWord on ''."""
    if not word:
        raise EmptyWord("monodromy word is empty")
    return Monodromy(_word_product(word), str(word))


def act(m, s):
    """The projective action of a monodromy on a slope."""
    (a, b), (c, d) = m.matrix
    return Slope(a * s.p + b * s.q, c * s.p + d * s.q)


def adjacent(s, t):
    """True when the slopes span an edge of the Farey graph."""
    return abs(s.p * t.q - s.q * t.p) == 1


def _xgcd(a, b):
    # returns (g, x, y) with x*a + y*b = g = gcd(a, b), g >= 0
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_x, x = x, old_x - quot * x
        old_y, y = y, old_y - quot * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _steps_from_infinity(p, q):
    # Distance from 1/0 to p/q by the least-absolute-remainder expansion:
    # step to the integer b nearest p/q, then pull b back to infinity with
    # z -> -1/(z - b), sending the target to -q/(p - b q).  The remainder
    # at worst halves q, and an exact tie |p - b q| = q/2 forces q = 2
    # (gcd 1), where both roundings finish in one step, so the rounding
    # direction never matters.
    n = 0
    while q:
        if q < 0:
            p, q = -p, -q
        b = (2 * p + q) // (2 * q)
        p, q = -q, p - b * q
        n += 1
    return n


def _distance_pq(p0, q0, p1, q1):
    # both pairs reduced and canonical (q >= 0, infinity = (1, 0))
    cross = p0 * q1 - q0 * p1
    if cross == 0:
        return 0
    g, alpha, beta = _xgcd(p0, q0)
    return _steps_from_infinity(alpha * p1 + beta * q1, cross)


def distance(s, t):
    """Farey-graph distance between two slopes, exactly.

    The first slope is moved to infinity by an integer isometry of the
    tessellation and the remaining distance is read off the minimal
    continued-fraction expansion of the image of the second.
    """
    return _distance_pq(s.p, s.q, t.p, t.q)


def _box_pairs(bound):
    yield (1, 0)
    for q in range(1, bound + 1):
        for p in range(-bound, bound + 1):
            if gcd(p, q) == 1:
                yield (p, q)


def slopes_in_box(bound):
    """All slopes with |p| <= bound and q <= bound, infinity included."""
    return [Slope(p, q) for p, q in _box_pairs(bound)]


def translation_distance(m, with_schedule=False):
    """Minimum of d(s, m s) over all slopes, by expanding exhaustive search.

    The search box starts at the square root of the largest matrix entry,
    the scale where the pivot slopes along the axis live, and doubles until
    the minimum survives two doublings unchanged; with_schedule additionally
    returns the (bound, minimum) pairs so reports can record how the value
    stabilised.  A pseudo-Anosov monodromy fixes no slope, so the result is
    at least 1.
    """
    if not m.is_pseudo_anosov:
        raise NotPseudoAnosov("|trace| = %d is not > 2" % abs(m.trace))
    (a, b), (c, d) = m.matrix
    bound = max(2, isqrt(max(abs(x) for row in m.matrix for x in row)))
    schedule = []
    stable = 0
    best = None
    while True:
        cur = None
        for p, q in _box_pairs(bound):
            ip, iq = a * p + b * q, c * p + d * q
            if iq < 0 or (iq == 0 and ip < 0):
                ip, iq = -ip, -iq
            step = _distance_pq(p, q, ip, iq)
            if cur is None or step < cur:
                cur = step
            if cur == 1:
                # |trace| > 2 leaves no fixed slope, so 1 is already minimal
                break
        schedule.append((bound, cur))
        if cur == best:
            stable += 1
            if stable == 2:
                break
        else:
            best = cur
            stable = 0
        bound *= 2
    assert best >= 1
    if with_schedule:
        return best, tuple(schedule)
    return best


def stable_upper(m, N):
    """The ratios d(inf, m^n inf)/n for n = 1..N, as exact fractions.

    The distances are subadditive in n, so the running infimum of the list
    is a certified upper estimate for the stable translation distance.
    """
    out = []
    power = m
    for n in range(1, N + 1):
        out.append(Fraction(distance(INFINITY, act(power, INFINITY)), n))
        power = power * m
    return out
