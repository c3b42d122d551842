# Test objects for the energy experiments: transition profiles, linear jumps, polygons and their coverings
# Builds the polygon phase fields and the counterexample field pair

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, TYPE_CHECKING
import logging
import math

import numpy as np
import pandas as pd
import shapely
from shapely.geometry import LineString, Polygon as ShapelyPolygon
from shapely.validation import explain_validity
from scipy import fft

from utils.errors import ValidationError
from utils.grid_field import GridField, h1_seminorm_sq
from utils.shearlet_core import smoothstep

if TYPE_CHECKING:
    from utils.energies import AnisotropyNorm

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
PACKET_FREQUENCY = 1.0
PACKET_RADIUS = 0.12


# MARK: Transition profiles
@dataclass(frozen=True)
class TransitionProfile:
    """
    Ξ(η, y) on [−1/2, 1/2] with Ξ(η, ±1/2) = ±1/2, extended constantly beyond.

    Non-directional profiles ignore η. `sup_derivative` is ‖Ξ′‖∞.
    """
    fn: Callable[[np.ndarray, Optional[np.ndarray]], np.ndarray] = field(repr=False)
    derivative: Callable[[np.ndarray, Optional[np.ndarray]], np.ndarray] = field(repr=False)
    sup_derivative: float
    label: str
    directional: bool = False

    def __post_init__(self):
        eta = np.array([[1.0, 0.0], [0.0, 1.0], [math.sqrt(0.5), math.sqrt(0.5)]])
        ends = self.fn(np.array([-0.5, -0.5, -0.5]), eta), self.fn(np.array([0.5, 0.5, 0.5]), eta)
        if not (np.allclose(ends[0], -0.5, atol=1e-12) and np.allclose(ends[1], 0.5, atol=1e-12)):
            raise ValidationError(f"Profile '{self.label}' does not map ±1/2 to ±1/2")

    def __call__(self, y, eta=None) -> np.ndarray:
        return self.fn(np.clip(y, -0.5, 0.5), eta)

    def slope(self, y, eta=None) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return np.where(np.abs(y) < 0.5, self.derivative(np.clip(y, -0.5, 0.5), eta), 0.0)

    @classmethod
    def sine(cls) -> "TransitionProfile":
        return cls(lambda y, eta: 0.5 * np.sin(np.pi * y),
                   lambda y, eta: 0.5 * np.pi * np.cos(np.pi * y),
                   0.5 * math.pi, "sine")

    @classmethod
    def truncated_logistic(cls, kappa: float) -> "TransitionProfile":
        """
        Ξ(y) = ½tanh(κy)/tanh(κ/2).
        """
        if not kappa > 0:
            raise ValidationError(f"κ must be positive, got {kappa}")
        norm = math.tanh(0.5 * kappa)
        return cls(lambda y, eta: 0.5 * np.tanh(kappa * y) / norm,
                   lambda y, eta: 0.5 * kappa / (norm * np.cosh(kappa * y) ** 2),
                   0.5 * kappa / norm, f"logistic({kappa:g})")

    @classmethod
    def optimal(cls, width: "DirectionalWidth", norm: "AnisotropyNorm") -> "TransitionProfile":
        """
        Directional logistic profile with κ(η) = W(η)/(4Ω(η)), the truncated optimal
        one-dimensional profile of the classical anisotropic energy.
        """
        def kappa(eta):
            eta = np.asarray(eta, dtype=float)
            return width(eta) / (4.0 * norm(eta))

        def value(y, eta):
            k = kappa(eta)
            return 0.5 * np.tanh(k * y) / np.tanh(0.5 * k)

        def derivative(y, eta):
            k = kappa(eta)
            return 0.5 * k / (np.tanh(0.5 * k) * np.cosh(k * y) ** 2)

        angles = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
        k_max = float(np.max(kappa(np.stack([np.cos(angles), np.sin(angles)], axis=-1))))
        return cls(value, derivative, 0.5 * k_max / math.tanh(0.5 * k_max), f"optimal({norm.label})", True)


@dataclass(frozen=True)
class DirectionalWidth:
    """
    W: S¹ → ℝ⁺ with its sampled range.
    """
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    label: str
    lower: float = field(init=False)
    upper: float = field(init=False)

    def __post_init__(self):
        angles = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
        samples = np.asarray(self.fn(np.stack([np.cos(angles), np.sin(angles)], axis=-1)), dtype=float)
        samples = np.broadcast_to(samples, angles.shape)
        if not (np.all(np.isfinite(samples)) and np.min(samples) > 0):
            raise ValidationError(f"Width '{self.label}' must be finite and positive on the circle")
        object.__setattr__(self, "lower", float(np.min(samples)))
        object.__setattr__(self, "upper", float(np.max(samples)))

    def __call__(self, eta) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        return np.broadcast_to(np.asarray(self.fn(eta), dtype=float), eta.shape[:-1])

    @property
    def is_constant(self) -> bool:
        return self.upper - self.lower <= 1e-14 * self.upper

    @classmethod
    def constant(cls, w: float) -> "DirectionalWidth":
        return cls(lambda eta: np.full(np.shape(eta)[:-1], float(w)), f"constant({w:g})")


# MARK: Linear jumps
@dataclass(frozen=True)
class LinearJump:
    """
    Heaviside function H^n across the line ⟨x, n⟩ = 0, or its smoothed version of
    width w·ε when a profile is given.

    The phase with value 1 is {⟨x, n⟩/n_d < 0}, where n_d is the dominant
    component of n (n₁ when |n₂/n₁| ≤ 1, n₂ otherwise).
    """
    normal: Tuple[float, float]
    eps: Optional[float] = None
    profile: Optional[TransitionProfile] = None
    width: float = 1.0

    def __post_init__(self):
        n1, n2 = (float(v) for v in self.normal)
        if n1 == 0.0 and n2 == 0.0:
            raise ValidationError("Jump normal must be non-zero")
        if (self.profile is None) != (self.eps is None):
            raise ValidationError("A smoothed jump needs both ε and a profile")
        if self.eps is not None and not (self.eps > 0 and self.width > 0):
            raise ValidationError(f"Need ε, w > 0, got {self.eps}, {self.width}")
        object.__setattr__(self, "normal", (n1, n2))

    @property
    def orientation(self) -> float:
        n1, n2 = self.normal
        dominant = n1 if abs(n2) <= abs(n1) else n2
        return math.copysign(1.0, dominant)

    @property
    def unit_normal(self) -> np.ndarray:
        n = np.array(self.normal)
        return self.orientation * n / np.linalg.norm(n)

    def signed_distance(self, x1, x2) -> np.ndarray:
        n = self.unit_normal
        return n[0] * np.asarray(x1) + n[1] * np.asarray(x2)

    def __call__(self, x1, x2) -> np.ndarray:
        d = self.signed_distance(x1, x2)
        if self.profile is None:
            return np.where(d < 0, 1.0, 0.0)
        return 0.5 - self.profile(d / (self.width * self.eps), self._eta(d))

    def gradient(self, x1, x2) -> Tuple[np.ndarray, np.ndarray]:
        d = self.signed_distance(x1, x2)
        if self.profile is None:
            return np.zeros_like(d), np.zeros_like(d)
        scale = self.width * self.eps
        slope = -self.profile.slope(d / scale, self._eta(d)) / scale
        n = self.unit_normal
        return slope * n[0], slope * n[1]

    def _eta(self, d: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.unit_normal, np.shape(d) + (2,))


def heaviside(n: Sequence[float]) -> LinearJump:
    return LinearJump(tuple(n))


def smooth_heaviside(eps: float, profile: TransitionProfile, w: float, n: Sequence[float]) -> LinearJump:
    return LinearJump(tuple(n), eps, profile, w)


def packet_radius(index: int) -> float:
    # with ν = ν₀2^k the ratio 2^k·ρ/ν decays like 2^{−3k/5}
    return PACKET_RADIUS * 2.0 ** (-0.6 * index)


def box_h1_seminorm_sq(jump: LinearJump, r: float, m: int = 1024) -> float:
    """
    ∫_{(−r,r)²}|∇H|² by the m×m midpoint rule.
    """
    if not r > 0:
        raise ValidationError(f"Box half-width must be positive, got {r}")
    h = 2.0 * r / m
    axis = -r + h * (np.arange(m) + 0.5)
    x1, x2 = np.meshgrid(axis, axis, indexing="ij")
    g1, g2 = jump.gradient(x1, x2)
    return float(np.sum(g1 ** 2 + g2 ** 2) * h * h)


def sample_on_torus(fn: Callable[[np.ndarray, np.ndarray], np.ndarray], n: int, extent: float = 1.0,
                    centered: bool = True) -> GridField:
    """
    Sample fn on the torus of side `extent`, centred on the origin unless `centered` is False.
    """
    origin = (-extent / 2.0, -extent / 2.0) if centered else (0.0, 0.0)
    return GridField.from_function(fn, n, extent, origin)


# MARK: Polygons
def _segment_distance_sq(p1: np.ndarray, p2: np.ndarray, a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # squared distance from points (p1, p2) to segment [a, b] and the clipped edge parameter
    d = b - a
    length_sq = float(d @ d)
    t = np.clip(((p1 - a[0]) * d[0] + (p2 - a[1]) * d[1]) / length_sq, 0.0, 1.0)
    q1, q2 = a[0] + t * d[0], a[1] + t * d[1]
    return (p1 - q1) ** 2 + (p2 - q2) ** 2, t


@dataclass(frozen=True)
class Polygon:
    """
    Simple polygon inside (0, 1)² with counter-clockwise vertices.

    Edge i runs from vertex i to vertex i+1 (cyclically); normals point outward.
    """
    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValidationError("A polygon needs at least three 2-d vertices")
        if not np.all(np.isfinite(v)) or np.any(v <= 0.0) or np.any(v >= 1.0):
            raise ValidationError("Polygon vertices must lie in the open unit square")
        shape = ShapelyPolygon(v)
        if not shape.is_valid or shape.area <= 0:
            raise ValidationError(f"Degenerate or self-intersecting polygon: {explain_validity(shape)}")
        if not shape.exterior.is_ccw:
            v = v[::-1].copy()
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        if np.min(lengths) <= 1e-12:
            raise ValidationError("Polygon has coincident consecutive vertices")
        cross = edges[:, 0] * np.roll(edges, 1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, 1, axis=0)[:, 0]
        if np.any(np.abs(cross) <= 1e-14 * lengths * np.roll(lengths, 1)):
            raise ValidationError("Polygon has collinear consecutive edges")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def count(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @property
    def edge_lengths(self) -> np.ndarray:
        e = self.edges
        return np.hypot(e[:, 0], e[:, 1])

    @property
    def normals(self) -> np.ndarray:
        e = self.edges / self.edge_lengths[:, None]
        return np.stack([e[:, 1], -e[:, 0]], axis=-1)

    @property
    def length(self) -> float:
        return float(np.sum(self.edge_lengths))

    @property
    def shape(self) -> ShapelyPolygon:
        return ShapelyPolygon(self.vertices)

    def margin(self) -> float:
        """
        Distance from ∂P to the boundary of the unit square.
        """
        v = self.vertices
        return float(np.min(np.concatenate([v.ravel(), 1.0 - v.ravel()])))

    def contains(self, x1, x2) -> np.ndarray:
        return shapely.contains_xy(self.shape, x1, x2)

    def vertex_angles(self) -> np.ndarray:
        """
        Interior angle at each vertex, in (0, 2π).
        """
        e = self.edges
        incoming = -np.roll(e, 1, axis=0)
        turn = np.arctan2(incoming[:, 0] * e[:, 1] - incoming[:, 1] * e[:, 0],
                          incoming[:, 0] * e[:, 0] + incoming[:, 1] * e[:, 1])
        return np.mod(-turn, 2.0 * np.pi)

    def smallest_angle(self) -> float:
        theta = self.vertex_angles()
        return float(np.min(np.minimum(theta, 2.0 * np.pi - theta)))

    def radius_bound(self) -> float:
        """
        r₀ = min(r₁, r₂)/8: r₁ the least distance between non-neighbouring edges, r₂ the shortest edge.
        """
        segments = [LineString([self.vertices[i], self.vertices[(i + 1) % self.count]]) for i in range(self.count)]
        r1 = math.inf
        for i in range(self.count):
            for j in range(i + 2, self.count):
                if i == 0 and j == self.count - 1:
                    continue
                r1 = min(r1, segments[i].distance(segments[j]))
        return min(r1, float(np.min(self.edge_lengths))) / 8.0

    def boundary_distance_sq(self, x1: np.ndarray, x2: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Squared Euclidean distance to ∂P, the nearest edge (lowest index on ties) and its parameter.
        """
        best = np.full(np.shape(x1), np.inf)
        edge = np.zeros(np.shape(x1), dtype=int)
        param = np.zeros(np.shape(x1))
        for i in range(self.count):
            dist, t = _segment_distance_sq(x1, x2, self.vertices[i], self.vertices[(i + 1) % self.count])
            closer = dist < best
            best = np.where(closer, dist, best)
            edge = np.where(closer, i, edge)
            param = np.where(closer, t, param)
        return best, edge, param

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.vertices, columns=["x1", "x2"])

    @classmethod
    def square(cls, lo: float, hi: float) -> "Polygon":
        return cls(np.array([[lo, lo], [hi, lo], [hi, hi], [lo, hi]]))

    @classmethod
    def random_star(cls, rng: np.random.Generator, k: int, center: Tuple[float, float] = (0.5, 0.5),
                    radii: Tuple[float, float] = (0.12, 0.35), min_gap: float = 0.25) -> "Polygon":
        """
        Star-shaped polygon with k vertices at sorted random angles around `center`.
        """
        if k < 3:
            raise ValidationError(f"Need at least three vertices, got {k}")
        gap = min(min_gap, 2.0 * np.pi / k * 0.5)
        while True:
            angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, k))
            spacing = np.diff(np.concatenate([angles, [angles[0] + 2.0 * np.pi]]))
            if np.min(spacing) >= gap and np.max(spacing) < np.pi:
                break
        r = rng.uniform(radii[0], radii[1], k)
        vertices = np.stack([center[0] + r * np.cos(angles), center[1] + r * np.sin(angles)], axis=-1)
        return cls(vertices)


# MARK: Covering
@dataclass(frozen=True)
class Covering:
    """
    Disjoint semi-open cubes C(z, s) = z + (−s, s]² covering ∂P: L_i edge cubes of
    half-width s_i per edge and one cube of half-width r at each vertex.
    """
    polygon: Polygon
    r: float
    c0: float
    r0: float
    counts: np.ndarray = field(repr=False)
    half_widths: np.ndarray = field(repr=False)
    centers: Tuple[np.ndarray, ...] = field(repr=False)

    def cubes(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        All cube centers (M, 2) and half-widths (M,), edge cubes first, then vertex cubes.
        """
        centers = [c for c in self.centers if c.size] + [self.polygon.vertices]
        widths = [np.full(c.shape[0], s) for c, s in zip(self.centers, self.half_widths) if c.size]
        widths.append(np.full(self.polygon.count, self.r))
        return np.concatenate(centers), np.concatenate(widths)

    def membership_counts(self, points: np.ndarray) -> np.ndarray:
        centers, widths = self.cubes()
        counts = np.zeros(points.shape[0], dtype=int)
        for start in range(0, points.shape[0], 4096):
            p = points[start:start + 4096, None, :]
            inside = (p > centers - widths[:, None]) & (p <= centers + widths[:, None])
            counts[start:start + 4096] = np.sum(np.all(inside, axis=-1), axis=1)
        return counts

    def check_disjoint(self) -> bool:
        centers, widths = self.cubes()
        lo = centers - widths[:, None]
        hi = centers + widths[:, None]
        overlap = np.all(np.maximum(lo[:, None], lo[None]) < np.minimum(hi[:, None], hi[None]) - 1e-12, axis=-1)
        np.fill_diagonal(overlap, False)
        return not bool(np.any(overlap))

    def half_width_bounds_hold(self) -> bool:
        return bool(np.all(self.half_widths >= self.c0 * self.r / 4 - 1e-15)
                    and np.all(self.half_widths <= self.c0 * self.r / 2 + 1e-15))

    def count_bounds(self) -> Tuple[bool, bool]:
        """
        (ΣL_i ≥ ℓ(P)/(4r), ΣL_i ≤ ℓ(P)/r).
        """
        total = int(np.sum(self.counts))
        length = self.polygon.length
        return total >= length / (4.0 * self.r), total <= length / self.r

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for i, (centers, s) in enumerate(zip(self.centers, self.half_widths)):
            for k, z in enumerate(centers, start=1):
                rows.append({"edge_index": i, "k": k, "z1": z[0], "z2": z[1], "s": s})
        return pd.DataFrame(rows, columns=["edge_index", "k", "z1", "z2", "s"])


class PhaseConstructs:
    def __init__(self, instance_id=None, workers: Optional[int] = None):
        """
        Initialize the PhaseConstructs utility.

        Parameters
        ----------
        instance_id : int, optional
            The instance ID for logging purposes. If not provided, uses default logger.
        workers : int, optional
            Worker count forwarded to scipy.fft.
        """
        # Logging
        if instance_id:
            logger_name = f"utils.phase_constructs.instance_{instance_id}"
        else:
            logger_name = "utils.phase_constructs"
        self.logger = logging.getLogger(logger_name)
        self.workers = workers
        self.logger.info("Initialized PhaseConstructs utility")

    # MARK: Covering
    def covering(self, P: Polygon, r: float) -> Covering:
        """
        Disjoint cube cover of ∂P built edge by edge.

        Parameters
        ----------
        P : Polygon
            The polygon.
        r : float
            Vertex cube half-width, 0 < r < r₀(P).

        Returns
        -------
        Covering
            Counts, half-widths and centers per edge.

        Raises
        ------
        ValidationError
            If r is outside (0, r₀) or the polygon has a straight angle.
        """
        r0 = P.radius_bound()
        if not 0 < r < r0:
            self.logger.error(f"Covering radius {r} outside (0, {r0})")
            raise ValidationError(f"Covering radius must lie in (0, r₀ = {r0:.6g}), got {r}")
        c0 = min(math.sin(P.smallest_angle()), 1.0) / 2.0
        if not c0 > 0:
            raise ValidationError("Polygon has a straight angle")
        counts, widths, centers = [], [], []
        for i in range(P.count):
            start = P.vertices[i]
            step = P.edges[i]
            kappa = float(np.max(np.abs(step)))
            count = max(1, math.ceil((kappa - 2.0 * r) / (r * c0) - 1e-9))
            s = (kappa - 2.0 * r) / (2.0 * count)
            w = r + 2.0 * s * np.arange(1, count + 1) - s
            centers.append(start + (w / kappa)[:, None] * step)
            counts.append(count)
            widths.append(s)
        cover = Covering(P, r, c0, r0, np.array(counts), np.array(widths), tuple(centers))
        lower, upper = cover.count_bounds()
        self.logger.info(f"Covering with r={r}: c0={c0:.4f}, r0={r0:.4f}, {int(np.sum(counts))} edge cubes, "
                         f"count bounds lower={lower} upper={upper}")
        return cover

    # MARK: Polygon phase field
    def smoothed_normal(self, P: Polygon, edge: np.ndarray, param: np.ndarray, half_arc: float) -> np.ndarray:
        """
        Outer normal at the boundary point (edge, param), interpolated along the shorter arc
        between adjacent edge normals within `half_arc` of a vertex.
        """
        angles = np.arctan2(P.normals[:, 1], P.normals[:, 0])
        lengths = P.edge_lengths
        h = min(half_arc, 0.5 * float(np.min(lengths)))
        theta = angles[edge]
        from_start = param * lengths[edge]
        from_end = (1.0 - param) * lengths[edge]

        prev_turn = _angle_difference(angles[edge], angles[(edge - 1) % P.count])
        near_start = from_start < h
        lam = (h + from_start) / (2.0 * h)
        theta = np.where(near_start, angles[edge] - (1.0 - lam) * prev_turn, theta)

        next_turn = _angle_difference(angles[(edge + 1) % P.count], angles[edge])
        near_end = from_end < h
        lam = (h - from_end) / (2.0 * h)
        theta = np.where(near_end, angles[edge] + lam * next_turn, theta)
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1)

    def weighted_projection(self, P: Polygon, width: DirectionalWidth, x1: np.ndarray,
                            x2: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        argmin over ∂P of W((x−y)/|x−y|)|x−y|, returned as (weighted distance, edge, parameter).

        Constant widths reduce to the nearest point. Otherwise each edge is searched by golden
        section from the best of an 8-point scan; ties go to the lowest edge index.
        """
        if width.is_constant:
            dist_sq, edge, param = P.boundary_distance_sq(x1, x2)
            return width.upper * np.sqrt(dist_sq), edge, param

        def cost(i: int, t: np.ndarray) -> np.ndarray:
            y = P.vertices[i][:, None] + P.edges[i][:, None] * t[None]
            d1, d2 = x1 - y[0], x2 - y[1]
            r = np.hypot(d1, d2)
            safe = np.where(r > 0, r, 1.0)
            eta = np.stack([d1 / safe, d2 / safe], axis=-1)
            return np.where(r > 0, width(eta) * r, 0.0)

        best = np.full(x1.shape, np.inf)
        edge = np.zeros(x1.shape, dtype=int)
        param = np.zeros(x1.shape)
        scan = np.linspace(0.0, 1.0, 8)
        for i in range(P.count):
            values = np.stack([cost(i, np.full(x1.shape, t)) for t in scan])
            seed = np.argmin(values, axis=0)
            lo = scan[np.maximum(seed - 1, 0)]
            hi = scan[np.minimum(seed + 1, scan.size - 1)]
            a = hi - _GOLDEN * (hi - lo)
            b = lo + _GOLDEN * (hi - lo)
            fa, fb = cost(i, a), cost(i, b)
            for _ in range(48):
                left = fa < fb
                hi = np.where(left, b, hi)
                lo = np.where(left, lo, a)
                a, b = hi - _GOLDEN * (hi - lo), lo + _GOLDEN * (hi - lo)
                fa, fb = cost(i, a), cost(i, b)
            t = 0.5 * (lo + hi)
            candidates = np.stack([cost(i, t), values[0], values[-1]])
            choice = np.argmin(candidates, axis=0)
            local = np.choose(choice, [t, np.zeros_like(t), np.ones_like(t)])
            value = np.min(candidates, axis=0)
            closer = value < best
            best = np.where(closer, value, best)
            edge = np.where(closer, i, edge)
            param = np.where(closer, local, param)
        return best, edge, param

    def polygon_phase_field(self, P: Polygon, eps: float, profile: TransitionProfile, width: DirectionalWidth,
                            n: int) -> GridField:
        """
        Phase field P_{ε,Ξ,W} on the unit torus.

        Inside the band |x − π(x)| < εW(η) the value is ½ − Ξ(η, ±|x − π(x)|/(εW(η))),
        negative inside P, with η the smoothed normal at π(x); Ξ is constant
        beyond ±1/2, so the field is 1 deep inside and 0 far outside.

        Raises
        ------
        ValidationError
            If ε ≤ 0 or the band reaches the boundary of the unit square.
        """
        if not eps > 0:
            raise ValidationError(f"ε must be positive, got {eps}")
        reach = eps * width.upper
        if reach >= P.margin():
            self.logger.error(f"Transition band {reach:.4g} reaches the domain boundary (margin {P.margin():.4g})")
            raise ValidationError(f"ε·max W = {reach:.4g} is not below the polygon margin {P.margin():.4g}")
        grid = np.arange(n) / n
        x1, x2 = np.meshgrid(grid, grid, indexing="ij")
        inside = P.contains(x1, x2)
        values = np.where(inside, 1.0, 0.0)

        dist_sq, _, _ = P.boundary_distance_sq(x1, x2)
        band = dist_sq < reach ** 2
        if np.any(band):
            b1, b2 = x1[band], x2[band]
            _, edge, param = self.weighted_projection(P, width, b1, b2)
            y = P.vertices[edge] + P.edges[edge] * param[:, None]
            distance = np.hypot(b1 - y[:, 0], b2 - y[:, 1])
            eta = self.smoothed_normal(P, edge, param, 0.5 * eps * max(1.0, width.upper))
            scaled = distance / (eps * width(eta))
            signed = np.where(inside[band], -scaled, scaled)
            values[band] = 0.5 - profile(signed, eta)
        return GridField(n, values)

    # MARK: Counterexample
    def counterexample_pair(self, index: int, n: int, shape: str = "disc",
                            nu0: float = PACKET_FREQUENCY) -> Tuple[GridField, GridField]:
        """
        Fields (u_k, g_k) with disjoint supports in (0,½)² and (½,1)².

        u_k is χ_D mollified at width 2^{−(k+2)} for a disc or square D; g_k is a
        Gaussian-windowed plane wave with frequency ν₀2^k and radius
        0.12·2^{−3k/5}, scaled so that |g_k|_{H¹} = |u_k|²_{H¹}. Since |u_k|²_{H¹}
        grows like 2^k, ‖g_k‖_{L¹} decays like 2^{−3k/5}.

        Parameters
        ----------
        index : int
            Sequence index k ≥ 1.
        n : int
            Grid side; the packet frequency must not exceed n/4.
        shape : str
            "disc" or "square".
        nu0 : float
            Base packet frequency.

        Returns
        -------
        tuple of GridField
            (u_k, g_k).
        """
        if index < 1:
            raise ValidationError(f"Counterexample index must be >= 1, got {index}")
        nu = nu0 * 2.0 ** index
        if nu > n / 4:
            raise ValidationError(f"Packet frequency {nu:g} at k={index} exceeds n/4 = {n / 4:g}; "
                                  f"use n >= {int(4 * nu)}")
        grid = np.arange(n) / n
        x1, x2 = np.meshgrid(grid, grid, indexing="ij")
        if shape == "disc":
            indicator = ((x1 - 0.25) ** 2 + (x2 - 0.25) ** 2 < 0.12 ** 2).astype(float)
        elif shape == "square":
            indicator = ((np.abs(x1 - 0.25) < 0.11) & (np.abs(x2 - 0.25) < 0.11)).astype(float)
        else:
            raise ValidationError(f"Unknown jump set '{shape}'")

        sigma = 2.0 ** (-(index + 2))
        if sigma * n < 2.0:
            self.logger.warning(f"Mollification width {sigma} is below two grid cells at n={n}")
        k = fft.fftfreq(n, d=1.0 / n)
        kernel = np.exp(-2.0 * np.pi ** 2 * sigma ** 2 * (k[:, None] ** 2 + k[None, :] ** 2))
        mollified = fft.ifft2(fft.fft2(indicator, workers=self.workers) * kernel, workers=self.workers).real
        u = GridField(n, mollified * _box_window(x1, x2, 0.0))

        rho = packet_radius(index)
        if rho * n < 2.0:
            self.logger.warning(f"Packet radius {rho:.4g} is below two grid cells at n={n}")
        packet = np.exp(-((x1 - 0.75) ** 2 + (x2 - 0.75) ** 2) / (2.0 * rho ** 2)) * np.cos(2.0 * np.pi * nu * x1)
        unit = GridField(n, packet * _box_window(x1, x2, 0.5))
        amplitude = h1_seminorm_sq(u) / math.sqrt(h1_seminorm_sq(unit))
        g = unit.scaled(amplitude)
        self.logger.info(f"Counterexample k={index} ({shape}): σ={sigma:.4g}, ν={nu:g}, ρ={rho:.4g}, "
                         f"amplitude={amplitude:.4g}")
        return u, g


def _angle_difference(to: np.ndarray, frm: np.ndarray) -> np.ndarray:
    # signed shorter-arc difference in (−π, π]
    return np.mod(to - frm + np.pi, 2.0 * np.pi) - np.pi


def _box_window(x1: np.ndarray, x2: np.ndarray, offset: float) -> np.ndarray:
    # smooth cutoff equal to 1 on offset + [0.05, 0.45]², vanishing outside offset + (0.02, 0.48)²
    def profile(x):
        y = x - offset
        return smoothstep((y - 0.02) / 0.03) * smoothstep((0.48 - y) / 0.03)
    return profile(x1) * profile(x2)
