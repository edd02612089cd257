"""Phase portraits of ``f_c X_a``: fixed-step RK4 trajectories, zero contours, SVG/CSV.

This is the only floating-point part of the package.  Jets are evaluated as
the polynomials they store; integration is deterministic for a given spec.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import contourpy
import numpy as np
from numpy.polynomial import polynomial as npoly

from kernelflow.forms import OneForm, PlaneField
from kernelflow.jet import Jet
from kernelflow.parse import parse_expr

SPEED_TOL = 1e-9


class PortraitError(ValueError):
    pass


@dataclass(frozen=True)
class PortraitSpec:
    """Integration box, seeds and step.  ``window`` holds half-widths."""

    window: tuple[float, float] = (0.5, 0.5)
    seed_grid: tuple[int, int] = (7, 7)
    step: float = 1e-2
    max_steps: int = 4000
    c: tuple = ()
    resolution: int = 64
    seeds: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        w = self.window
        if isinstance(w, (int, float)):
            w = (float(w), float(w))
        w = tuple(float(v) for v in w)
        if len(w) != 2 or min(w) <= 0 or not np.all(np.isfinite(w)):
            raise PortraitError(f"window half-widths must be positive, got {self.window}")
        object.__setattr__(self, "window", w)
        if not self.step > 0:
            raise PortraitError("integration step must be positive")
        if not 1 <= self.max_steps <= 1_000_000:
            raise PortraitError("max_steps must lie in 1..1000000")
        if self.resolution < 16:
            raise PortraitError("contour resolution must be at least 16 per axis")
        if min(self.seed_grid) < 1:
            raise PortraitError("seed grid needs at least one point per axis")

    def seed_points(self) -> np.ndarray:
        if self.seeds is not None:
            return np.asarray(self.seeds, dtype=float).reshape(-1, 2)
        (wx, wy), (nx, ny) = self.window, self.seed_grid
        xs = np.linspace(-wx, wx, nx + 2)[1:-1]
        ys = np.linspace(-wy, wy, ny + 2)[1:-1]
        X, Y = np.meshgrid(xs, ys)
        return np.column_stack([X.ravel(), Y.ravel()])


@dataclass
class Trajectory:
    """One orbit through a seed: backward half reversed, then forward half."""

    seed: tuple[float, float]
    t: np.ndarray
    points: np.ndarray
    closed: bool = False

    def __len__(self):
        return len(self.t)


@dataclass
class PortraitScene:
    window: tuple[float, float]
    trajectories: list[Trajectory] = field(default_factory=list)
    equilibrium_curve: list[np.ndarray] = field(default_factory=list)
    singular_curves: list[np.ndarray] = field(default_factory=list)
    singular_points: list[tuple[float, float]] = field(default_factory=list)
    title: str = ""


# -- evaluation -------------------------------------------------------------

def _dense(f: Jet) -> np.ndarray:
    d = max(f.degree(), 0)
    C = np.zeros((d + 1, d + 1))
    for (i, j), c in f.coeffs.items():
        C[i, j] = float(c)
    return C


def evaluator(f: Jet) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    C = _dense(f)
    return lambda x, y: npoly.polyval2d(x, y, C)


def field_function(X: PlaneField) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized ``(m, 2) -> (m, 2)`` evaluation of a jet field."""
    fu, fv = evaluator(X.u), evaluator(X.v)

    def F(p):
        return np.column_stack([fu(p[:, 0], p[:, 1]), fv(p[:, 0], p[:, 1])])
    return F


def rk4_step(F, p: np.ndarray, h: float) -> np.ndarray:
    k1 = F(p)
    k2 = F(p + 0.5 * h * k1)
    k3 = F(p + 0.5 * h * k2)
    k4 = F(p + h * k3)
    return p + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_path(F, p0, h: float, n: int) -> np.ndarray:
    """``n`` plain RK4 steps from one point, no stopping rules."""
    p = np.asarray(p0, dtype=float).reshape(1, 2)
    out = [p[0].copy()]
    for _ in range(n):
        p = rk4_step(F, p, h)
        out.append(p[0].copy())
    return np.array(out)


def _exit_fraction(old: np.ndarray, new: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Fraction of each segment old->new that stays inside the box."""
    d = new - old
    s = np.ones(len(old))
    with np.errstate(divide="ignore", invalid="ignore"):
        for bound in (w, -w):
            r = (bound - old) / d
            hit = ((new > w) if bound is w else (new < -w)) & np.isfinite(r)
            r = np.where(hit, r, 1.0).min(axis=1)
            s = np.minimum(s, r)
    return np.clip(s, 0.0, 1.0)


def _sweep(F, seeds: np.ndarray, h: float, max_steps: int, window, closable: bool):
    """Integrate all seeds at once; returns per-seed point arrays, times and closed flags."""
    w = np.asarray(window, dtype=float)
    m = len(seeds)
    buf = np.full((max_steps + 1, m, 2), np.nan)
    tbuf = np.full((max_steps + 1, m), np.nan)
    buf[0] = seeds
    tbuf[0] = 0.0
    length = np.ones(m, dtype=int)
    closed = np.zeros(m, dtype=bool)
    speed0 = np.linalg.norm(F(seeds), axis=1)
    active = (speed0 >= SPEED_TOL) & np.all(np.abs(seeds) <= w, axis=1)
    far = np.zeros(m, dtype=bool)
    pos = seeds.copy()
    for n in range(1, max_steps + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        old = pos[idx]
        new = rk4_step(F, old, h)
        t_new = np.full(idx.size, n * h)
        bad = ~np.all(np.isfinite(new), axis=1)
        new[bad] = old[bad]
        out = np.any(np.abs(new) > w, axis=1)
        if out.any():
            s = _exit_fraction(old[out], new[out], w)
            new[out] = old[out] + s[:, None] * (new[out] - old[out])
            t_new[out] = (n - 1 + s) * h
        stop = out | bad
        if closable:
            step_len = np.linalg.norm(new - old, axis=1)
            dist = np.linalg.norm(new - seeds[idx], axis=1)
            far[idx] |= dist > 3 * step_len
            loop = far[idx] & (dist <= 0.6 * step_len) & ~stop
            if loop.any():
                new[loop] = seeds[idx[loop]]
                closed[idx[loop]] = True
                stop |= loop
        speed = np.linalg.norm(F(new), axis=1)
        stop |= speed < SPEED_TOL
        buf[n, idx] = new
        tbuf[n, idx] = t_new
        pos[idx] = new
        length[idx] += 1
        active[idx[stop]] = False
    paths = [buf[:length[s], s] for s in range(m)]
    times = [tbuf[:length[s], s] for s in range(m)]
    return paths, times, closed


def integrate(X: PlaneField, spec: PortraitSpec) -> PortraitScene:
    """Forward and backward RK4 orbits from every seed of ``spec``.

    Each orbit stops when it leaves the window (the last point is moved onto
    the boundary), after ``max_steps`` steps, when the speed drops below
    ``1e-9``, or when it returns to its seed (periodic orbit).
    """
    F = field_function(X)
    seeds = spec.seed_points()
    fw, tf, closed = _sweep(F, seeds, spec.step, spec.max_steps, spec.window, True)
    bw, tb, _ = _sweep(F, seeds, -spec.step, spec.max_steps, spec.window, False)
    trajs = []
    for s in range(len(seeds)):
        if closed[s]:
            pts, t = fw[s], tf[s]
        else:
            pts = np.concatenate([bw[s][:0:-1], fw[s]])
            t = np.concatenate([tb[s][:0:-1], tf[s]])
        trajs.append(Trajectory((float(seeds[s, 0]), float(seeds[s, 1])), t, pts, bool(closed[s])))
    return PortraitScene(spec.window, trajs)


# -- contours ---------------------------------------------------------------

def _grid(window, resolution: int):
    # an even node count keeps the axes (where the catalog curves live) off the grid
    n = resolution + (resolution % 2)
    xs = np.linspace(-window[0], window[0], n)
    ys = np.linspace(-window[1], window[1], n)
    return xs, ys


def cell_size(window, resolution: int) -> float:
    xs, ys = _grid(window, resolution)
    return float(np.hypot(xs[1] - xs[0], ys[1] - ys[0]))


def _zero_lines(fn, window, resolution: int) -> list[np.ndarray]:
    xs, ys = _grid(window, resolution)
    X, Y = np.meshgrid(xs, ys)
    Z = fn(X, Y)
    if not np.any(Z):
        return []
    gen = contourpy.contour_generator(X, Y, Z, line_type="Separate")
    lines = [np.asarray(L, dtype=float) for L in gen.lines(0.0) if len(L) >= 2]
    return merge_polylines(lines, 1e-9 * max(window))


def equilibrium_contour(f: Jet, window, resolution: int = 64) -> list[np.ndarray]:
    """Polylines approximating ``{f = 0}`` inside the window (marching squares)."""
    if resolution < 16:
        raise PortraitError("contour resolution must be at least 16 per axis")
    if isinstance(window, (int, float)):
        window = (float(window), float(window))
    return _zero_lines(evaluator(f), window, resolution)


def field_zero_set(X: PlaneField, window, resolution: int = 64):
    """Zero set of ``X`` in the window as ``(curves, points)``.

    Curves are found where one component vanishes identically on a contour
    of the other; isolated zeros are sign changes of ``v`` along ``{u = 0}``.
    Tangential zeros without a sign change are not detected.
    """
    if isinstance(window, (int, float)):
        window = (float(window), float(window))
    if X.u.is_zero() and X.v.is_zero():
        return [], []
    if X.u.is_zero():
        return _zero_lines(evaluator(X.v), window, resolution), []
    if X.v.is_zero():
        return _zero_lines(evaluator(X.u), window, resolution), []
    fv = evaluator(X.v)
    xs, ys = _grid(window, resolution)
    scale = float(np.abs(fv(*np.meshgrid(xs, ys))).max()) or 1.0
    curves, points = [], []
    for line in _zero_lines(evaluator(X.u), window, resolution):
        vals = fv(line[:, 0], line[:, 1])
        if np.abs(vals).max() <= 1e-9 * scale:
            curves.append(line)
            continue
        for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0):
            a, b = vals[i], vals[i + 1]
            s = 0.0 if a == b else a / (a - b)
            p = _newton(X, line[i] + s * (line[i + 1] - line[i]))
            if np.all(np.abs(p) <= window) and all(np.hypot(*(p - q)) > 1e-6 for q in points):
                points.append((float(p[0]), float(p[1])))
    return curves, points


def _newton(X: PlaneField, p: np.ndarray, steps: int = 8) -> np.ndarray:
    """Polish an approximate zero of ``X``; keeps the start if the Jacobian degenerates."""
    fu, fv = evaluator(X.u), evaluator(X.v)
    jac = [evaluator(d) for d in (X.u.diff_x(), X.u.diff_y(), X.v.diff_x(), X.v.diff_y())]
    q = np.array(p, dtype=float)
    for _ in range(steps):
        J = np.array([[jac[0](*q), jac[1](*q)], [jac[2](*q), jac[3](*q)]], dtype=float)
        r = np.array([fu(*q), fv(*q)], dtype=float)
        if abs(np.linalg.det(J)) < 1e-14:
            return np.asarray(p, dtype=float)
        q = q - np.linalg.solve(J, r)
    return q if np.hypot(*(q - p)) < 1e-2 else np.asarray(p, dtype=float)


def merge_polylines(lines: list[np.ndarray], tol: float) -> list[np.ndarray]:
    """Join polylines whose endpoints coincide within ``tol``."""
    lines = [np.asarray(L) for L in lines]
    merged = True
    while merged and len(lines) > 1:
        merged = False
        for i in range(len(lines)):
            for j in range(i + 1, len(lines)):
                a, b = lines[i], lines[j]
                for A, B in ((a, b), (a, b[::-1]), (a[::-1], b), (a[::-1], b[::-1])):
                    if np.hypot(*(A[-1] - B[0])) <= tol:
                        lines[i] = np.concatenate([A, B[1:]])
                        del lines[j]
                        merged = True
                        break
                if merged:
                    break
            if merged:
                break
    return lines


def _segments_cross(P: np.ndarray, Q: np.ndarray) -> bool:
    a0, a1 = P[:-1, None, :], P[1:, None, :]
    b0, b1 = Q[None, :-1, :], Q[None, 1:, :]

    def cross(o, p, q):
        return (p[..., 0] - o[..., 0]) * (q[..., 1] - o[..., 1]) - (p[..., 1] - o[..., 1]) * (q[..., 0] - o[..., 0])
    d1 = cross(a0, a1, b0)
    d2 = cross(a0, a1, b1)
    d3 = cross(b0, b1, a0)
    d4 = cross(b0, b1, a1)
    return bool(np.any((d1 * d2 <= 0) & (d3 * d4 <= 0)))


def curves_intersect(A: Sequence[np.ndarray], B: Sequence[np.ndarray]) -> bool:
    return any(_segments_cross(P, Q) for P in A for Q in B if len(P) > 1 and len(Q) > 1)


def point_near_curves(p, curves: Sequence[np.ndarray], tol: float) -> bool:
    p = np.asarray(p, dtype=float)
    for L in curves:
        a, b = L[:-1], L[1:]
        d = b - a
        dd = np.einsum("ij,ij->i", d, d)
        s = np.clip(np.einsum("ij,ij->i", p - a, d) / np.where(dd > 0, dd, 1), 0, 1)
        if np.hypot(*(a + s[:, None] * d - p).T).min() <= tol:
            return True
    return False


# -- scenes from families -----------------------------------------------------

def build_scene(family, c: Sequence, spec: PortraitSpec) -> PortraitScene:
    """Trajectories of ``f_c X_a`` plus ``{f_c = 0}`` and the zero set of ``X_a``."""
    from kernelflow.unfolding import member

    f_c, X = member(family, c)
    scene = integrate(X, spec)
    scene.equilibrium_curve = equilibrium_contour(f_c, spec.window, spec.resolution)
    scene.singular_curves, scene.singular_points = field_zero_set(
        family.field, spec.window, spec.resolution)
    scene.title = "c = (" + ", ".join(f"{float(v):g}" for v in c) + ")"
    return scene


def topology(scene: PortraitScene) -> dict:
    """Counts used to compare panels: components and whether they meet."""
    tol = cell_size(scene.window, 64)
    return {
        "equilibrium_components": len(scene.equilibrium_curve),
        "singular_curve_components": len(scene.singular_curves),
        "singular_points": len(scene.singular_points),
        "curves_cross": curves_intersect(scene.equilibrium_curve, scene.singular_curves),
        "point_on_curve": any(point_near_curves(p, scene.equilibrium_curve, tol)
                              for p in scene.singular_points),
    }


@dataclass(frozen=True)
class FigurePreset:
    name: str
    P: str
    Q: str
    base: str
    window: float
    c: tuple[float, ...]
    caption: str

    def family(self, order: int = 12):
        from kernelflow.unfolding import UnfoldingFamily

        form = OneForm(parse_expr(self.P, order), parse_expr(self.Q, order))
        return UnfoldingFamily(parse_expr(self.base, order), ((0, 0),), form)


FIGURES = {
    "darboux": FigurePreset("darboux", "0", "1 + x", "y - x^2", 0.5, (-0.1, 0.0, 0.1),
                            "(c + y - x^2) X_aD, Darboux form (1 + x) dy"),
    "martinet_plus": FigurePreset("martinet_plus", "0", "1 + x^2", "y - x^2", 0.5, (-0.1, 0.0, 0.1),
                                  "(c + y - x^2) X_aM, Martinet form (1 + x^2) dy"),
    "martinet_minus": FigurePreset("martinet_minus", "0", "1 - x^2", "y - x^2", 0.5, (-0.1, 0.0, 0.1),
                                   "(c + y - x^2) X_aM, Martinet form (1 - x^2) dy"),
    # the crossing point (0, -c) of the two equilibrium lines must fall outside the box
    "liouville": FigurePreset("liouville", "0", "x", "x + y", 0.25, (-0.3, 0.0, 0.3),
                              "(c + x + y) X_aL, Liouville form x dy"),
    "closed_plus": FigurePreset("closed_plus", "x", "y", "x + y", 0.5, (-0.3, 0.0, 0.3),
                                "(c + x + y) X_a2+, form x dx + y dy"),
    # x + y is invariant under X_a2-, so the transversal family uses x
    "closed_minus": FigurePreset("closed_minus", "x", "-y", "x", 0.5, (-0.3, 0.0, 0.3),
                                 "(c + x) X_a2-, form x dx - y dy"),
}


# -- output -----------------------------------------------------------------

def _arrow(ax, pts: np.ndarray, color: str):
    n = len(pts)
    if n < 3:
        return
    i = n // 2
    p, q = pts[i - 1], pts[i]
    if np.hypot(*(q - p)) == 0:
        return
    ax.annotate("", xy=tuple(q), xytext=tuple(p),
                arrowprops=dict(arrowstyle="-|>", color=color, lw=0.8, mutation_scale=9))


def render_svg(scene: PortraitScene, path) -> Path:
    """Write a standalone SVG; identical scenes give identical bytes."""
    import matplotlib
    from matplotlib.backends.backend_svg import FigureCanvasSVG
    from matplotlib.figure import Figure

    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": "kernelflow", "svg.fonttype": "none",
                                "path.simplify": False}):
        fig = Figure(figsize=(4, 4))
        FigureCanvasSVG(fig)
        ax = fig.add_subplot(111)
        wx, wy = scene.window
        ax.set_xlim(-wx, wx)
        ax.set_ylim(-wy, wy)
        ax.set_aspect("equal")
        ax.axhline(0, color="0.85", lw=0.5, zorder=0)
        ax.axvline(0, color="0.85", lw=0.5, zorder=0)
        for tr in scene.trajectories:
            if len(tr.points) > 1:
                ax.plot(tr.points[:, 0], tr.points[:, 1], "-", color="black", lw=0.7)
                _arrow(ax, tr.points, "black")
        for L in scene.equilibrium_curve:
            ax.plot(L[:, 0], L[:, 1], ":", color="tab:red", lw=2.0)
        for L in scene.singular_curves:
            ax.plot(L[:, 0], L[:, 1], linestyle=(0, (1, 3)), color="tab:blue", lw=2.5)
        if scene.singular_points:
            P = np.array(scene.singular_points)
            ax.plot(P[:, 0], P[:, 1], "o", color="tab:blue", ms=4)
        if scene.title:
            ax.set_title(scene.title, fontsize=9)
        with open(path, "wb") as fh:
            fig.savefig(fh, format="svg", metadata={"Date": None})
    return path


def write_csv(scene: PortraitScene, path) -> Path:
    """One block of ``t, x, y`` rows per trajectory, tagged by its index."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trajectory", "t", "x", "y"])
        for k, tr in enumerate(scene.trajectories):
            for t, (x, y) in zip(tr.t, tr.points):
                w.writerow([k, f"{t:.10g}", f"{x:.10g}", f"{y:.10g}"])
    return path
