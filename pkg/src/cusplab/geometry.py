"""Closed-form hyperbolic estimates in the upper half-space model.

Cusp neighborhoods lift to horoballs, and every estimate this package makes
about them reduces to a handful of exact formulas: the area growth of an
expanding cusp neighborhood on a surface with cone points, the length of
common tangent segments between disjoint horoballs, a disk-packing constant,
and the visual size of a shadow on the boundary of a Margulis tube.  This
module holds those formulas and nothing else; all of them are elementary
enough to be property-tested against direct numerical integration.

Horoballs are either euclidean balls resting on the boundary plane, recorded
by their ideal center and euclidean diameter, or the region above a
horizontal plane when the center is infinity, recorded by its cut height in
the same field.
"""

from dataclasses import dataclass
from math import exp, inf, log, pi, sinh, sqrt

from .errors import (
    CoincidentCenters,
    NegativeDistance,
    NonNegativeChi,
    NonPositiveArea,
    OverlappingHoroballs,
)

__all__ = [
    "PACKING",
    "TANGENT_MIN",
    "WAIST",
    "ConeCuspParams",
    "Horoball",
    "cone_cusp_area",
    "drift_bound",
    "horoball_distance",
    "max_cusp_area_bound",
    "packing_area_lower",
    "shadow_radius",
    "shortest_arc_length_bound",
    "tangent_lengths",
]

# shortest normalized longitude of a once-punctured-torus bundle cusp
WAIST = 2.0 ** 0.25

# least length of a tangent segment between horoballs on a common tangent
# geodesic; attained exactly at tangency
TANGENT_MIN = log(3.0 + 2.0 * sqrt(2.0))

# density of the optimal disk packing of the euclidean plane
PACKING = 2.0 * sqrt(3.0) / pi


@dataclass(frozen=True)
class Horoball:
    """A horoball: ideal center and euclidean diameter.

    center is a finite point of the boundary plane as a complex number, or
    math.inf for the horoball above a horizontal plane; diameter is the
    euclidean height of the top for finite centers and the cut height for
    the center at infinity.
    """
    center: complex
    diameter: float

    def __post_init__(self):
        if not self.diameter > 0:
            raise ValueError("horoball diameter must be positive")

    @property
    def at_infinity(self):
        return self.center == inf


def horoball_distance(h1, h2):
    """Signed distance between two horoball boundaries.

    Zero exactly at tangency and negative when the interiors overlap.  For
    finite centers u, v with diameters d1, d2 the connecting geodesic meets
    the boundaries a length ln(|u - v|^2 / (d1 d2)) apart; against the
    horoball at cut height h the vertical geodesic gives ln(h / d).
    """
    if h1.at_infinity and h2.at_infinity:
        raise CoincidentCenters("both horoballs are centered at infinity")
    if h1.at_infinity or h2.at_infinity:
        top, ball = (h1, h2) if h1.at_infinity else (h2, h1)
        return log(top.diameter / ball.diameter)
    gap = abs(complex(h1.center) - complex(h2.center))
    if gap == 0:
        raise CoincidentCenters("horoballs share the center %r" % (h1.center,))
    return log(gap * gap / (h1.diameter * h2.diameter))


def tangent_lengths(h1, h2):
    """Tangent-segment and horocycle-run lengths for disjoint horoballs.

    Normalize h1 to the half-plane above height one; h2 becomes a disk of
    radius r = e^(-delta)/2 resting on the boundary, delta being the
    distance between the two.  The geodesic tangent to both on a common side
    touches them a length l1 apart, and the touch point on the boundary of
    h1 sits a horocyclic length l2 from the foot of the common perpendicular:

        l1 = ln((1 + r + c) / r),   l2 = c = sqrt(1 + 2 r).

    Both are monotone in delta, so l1 >= ln(3 + 2 sqrt(2)) and l2 <= sqrt(2)
    with equality exactly at tangency.
    """
    delta = horoball_distance(h1, h2)
    if delta < 0:
        raise OverlappingHoroballs("horoball interiors meet (distance %g)"
                                   % delta)
    r = 0.5 * exp(-delta)
    c = sqrt(1.0 + 2.0 * r)
    return log((1.0 + r + c) / r), c


@dataclass(frozen=True)
class ConeCuspParams:
    """Growth data for a cusp neighborhood on a cone surface.

    base_area is the area of the embedded horoball quotient, cone_excess the
    total cone angle excess theta - 2 pi (zero on a smooth surface), and x_v
    the distance from the quotient boundary to the cone point.
    """
    base_area: float
    cone_excess: float = 0.0
    x_v: float = 0.0

    def __post_init__(self):
        if not self.base_area > 0:
            raise NonPositiveArea("base_area must be positive")
        if self.cone_excess < 0:
            raise ValueError("cone_excess is an angle excess, >= 0")
        if self.x_v < 0:
            raise NegativeDistance("x_v is a distance, >= 0")


def cone_cusp_area(params, x):
    """Area of the cusp neighborhood expanded a distance x.

    Pure exponential growth until the expanding boundary reaches the cone
    point, then an extra cone contribution 2 (theta - 2 pi) sinh^2((x-x_v)/2)
    on top; in particular area(x + d) >= e^d area(x) for all d >= 0.
    """
    if x < 0:
        raise NegativeDistance("expansion distance must be >= 0")
    area = exp(x) * params.base_area
    if x >= params.x_v and params.cone_excess:
        area += 2.0 * params.cone_excess * sinh(0.5 * (x - params.x_v)) ** 2
    return area


def max_cusp_area_bound(chi, singular):
    """Largest embedded cusp neighborhood area on a surface of this chi.

    -2 pi chi when cone points are allowed (the Gauss-Bonnet ceiling),
    -6 chi on a smooth surface.
    """
    if chi >= 0:
        raise NonNegativeChi("need chi < 0, got %r" % (chi,))
    return -2.0 * pi * chi if singular else -6.0 * chi


def shortest_arc_length_bound(chi, cusp_area, singular):
    """Upper bound for the shortest arc through a cusp neighborhood.

    Expanding a neighborhood of area A by x keeps it embedded until
    e^x A hits the area ceiling, and an arc through the collision has
    length at most twice that x, so 2 ln|ceiling / A|.
    """
    if chi >= 0:
        raise NonNegativeChi("need chi < 0, got %r" % (chi,))
    if not cusp_area > 0:
        raise NonPositiveArea("cusp_area must be positive")
    return 2.0 * log(max_cusp_area_bound(chi, singular) / cusp_area)


def drift_bound(arc_length):
    """Height change along a geodesic re-entering a cusp neighborhood.

    Crossing between tangency configurations costs at most sqrt(2)
    vertically; otherwise the crossing runs within a tangent segment of the
    arc, giving (arc_length - ln(3 + 2 sqrt(2)) + 2 sqrt(2)) / 2, which is
    arc_length/2 + 0.5328... .  Monotone non-decreasing in arc_length.
    """
    return max(sqrt(2.0),
               0.5 * (arc_length - TANGENT_MIN + 2.0 * sqrt(2.0)))


def shadow_radius(chi):
    """Radius of the boundary shadow of a deep point, sqrt(2)/(8 pi^2 chi^2)."""
    if chi >= 0:
        raise NonNegativeChi("need chi < 0, got %r" % (chi,))
    return sqrt(2.0) / (8.0 * pi * pi * chi * chi)


def packing_area_lower(num_disks, radius):
    """Area needed to pack disjoint disks, 2 sqrt(3) n r^2.

    The optimal plane packing has density 2 sqrt(3)/pi, so n disks of radius
    r occupy at least (2 sqrt(3)/pi) n pi r^2.
    """
    return 2.0 * sqrt(3.0) * num_disks * radius * radius
