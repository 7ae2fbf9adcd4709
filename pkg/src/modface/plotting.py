"""Report figures (written to files with the Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import rp5_model as r5  # noqa: E402

FIGSIZE = (6.4, 4.8)


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def residual_histogram(reports, path):
    """log10 residuals of every randomized check, one row per check."""
    rows = [r for r in reports if len(r.residuals) > 1]
    fig, ax = plt.subplots(figsize=(FIGSIZE[0], 0.4 * max(len(rows), 3) + 1.2))
    for k, rep in enumerate(rows):
        vals = np.log10(np.maximum(np.asarray(rep.residuals), 1e-18))
        jitter = np.random.default_rng(k).uniform(-0.15, 0.15, vals.size)
        ax.scatter(vals, k + jitter, s=4, alpha=0.5, color="C0" if rep.passed else "C3")
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels([f"{r.check} [{r.field}]" for r in rows], fontsize=7)
    ax.set_xlabel("log10 residual (floored at 1e-18)")
    ax.set_title("per-trial residuals")
    ax.grid(axis="x", alpha=0.3)
    return _save(fig, path)


def hasse_diagram(lat, path, title=""):
    """Hasse diagram with elements placed by height."""
    h = np.array(lat.heights())
    cov = lat.covers()
    pos = {}
    for level in np.unique(h):
        members = np.flatnonzero(h == level)
        xs = np.linspace(-1, 1, members.size + 2)[1:-1] if members.size > 1 else [0.0]
        for x, i in zip(xs, members):
            pos[i] = (x, level)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for i, j in zip(*np.nonzero(cov)):
        ax.plot([pos[i][0], pos[j][0]], [pos[i][1], pos[j][1]], color="0.6", lw=0.6, zorder=1)
    xy = np.array([pos[i] for i in range(lat.size)])
    ax.scatter(xy[:, 0], xy[:, 1], s=18, color="k", zorder=2)
    ax.set_yticks(np.unique(h))
    ax.set_ylabel("height")
    ax.set_xticks([])
    ax.set_title(title or f"face lattice ({lat.size} elements)")
    return _save(fig, path)


def _conic_grid(q, uv, pad=0.3):
    lo, hi = np.percentile(uv, [2, 98], axis=0)
    span = np.maximum(hi - lo, 1e-6)
    xs = np.linspace(lo[0] - pad * span[0], hi[0] + pad * span[0], 200)
    ys = np.linspace(lo[1] - pad * span[1], hi[1] + pad * span[1], 200)
    gx, gy = np.meshgrid(xs, ys)
    h = np.stack([gx, gy, np.ones_like(gx)], axis=-1)
    return gx, gy, np.einsum("...i,ij,...j->...", h, q, h)


def r5_faces(canon, path, n=200):
    """Boundaries of the six base faces in their spans, with the fitted conics."""
    body, config = canon.body, canon.config
    fig, axes = plt.subplots(2, 3, figsize=(9.6, 6.0))
    thetas = np.linspace(0, 2 * np.pi, n, endpoint=False)
    for i, ax in enumerate(axes.ravel()):
        t = config.incidence[i]
        w, _ = np.linalg.qr(np.column_stack([config.vectors[t[0]], config.vectors[t[1]]]))
        plane = config.spans[i]
        uv = plane.coords(body.boundary(w, thetas))
        q = r5.fit_conic(uv)
        gx, gy, val = _conic_grid(q, uv)
        ax.contour(gx, gy, val, levels=[0.0], colors="C1", linewidths=0.8)
        ax.scatter(uv[:, 0], uv[:, 1], s=3, color="C0")
        pts = plane.coords(config.points[list(t)])
        ax.scatter(pts[:, 0], pts[:, 1], s=18, color="k", zorder=3)
        ax.set_xlim(gx.min(), gx.max())
        ax.set_ylim(gy.min(), gy.max())
        ax.set_title(f"F{i + 1}: points {t}", fontsize=8)
        ax.tick_params(labelsize=6)
    fig.suptitle("base faces of the canonical body (samples and fitted conic)", fontsize=9)
    return _save(fig, path)


def r5_factors(path, c=2, d=3, extent=3.0):
    """Zero sets of the two factors of the combined condition in the (a, b) plane."""
    fz = r5.factor_condition(c, d)
    xs = np.linspace(-extent, extent, 300)
    ga, gb = np.meshgrid(xs, xs)

    def ev(p):
        return np.vectorize(lambda a, b: float(p(a=a, b=b)))(ga, gb)

    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.contour(ga, gb, ev(fz.quadratic), levels=[0.0], colors="C0")
    ax.contour(ga, gb, ev(fz.linear), levels=[0.0], colors="C3", linestyles="--")
    ax.plot([], [], color="C0", label=f"quadratic factor: {fz.quadratic}")
    ax.plot([], [], color="C3", ls="--", label=f"linear factor: {fz.linear}")
    ax.legend(fontsize=6, loc="upper left")
    ax.set_xlabel("a")
    ax.set_ylabel("b")
    ax.set_title(f"combined condition at (c, d) = ({c}, {d})")
    ax.set_aspect("equal")
    return _save(fig, path)


def section_lines(body, faces, labels, path, extent=3.0):
    """Line faces of a real ``M = E11`` section drawn in the chart ``v = (1, x, y)``."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    t = np.linspace(-2 * extent, 2 * extent, 2)
    for f, lab in zip(faces, labels):
        b = np.real(f.range.basis)
        ray = np.real(body.face_recession(f).basis[:, 0])
        # a point of the face off the kernel, scaled to first coordinate 1
        v = b[:, np.argmax(np.abs(b[0]))]
        v = v - ray * (ray @ v)
        v = v / v[0]
        direction = ray[1:] / np.linalg.norm(ray[1:])
        pts = v[1:][None, :] + t[:, None] * direction
        ax.plot(pts[:, 0], pts[:, 1], color=f"C{int(lab) % 10}", lw=0.8)
    ax.set_xlim(-extent, extent)
    ax.set_ylim(-extent, extent)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("line faces coloured by ray direction")
    return _save(fig, path)


def write_figures(result, out_dir):
    """Render the figures that apply to a run into ``out_dir``; returns the paths."""
    from . import sections as sec
    from .harness import e11_section

    out = Path(out_dir)
    paths = [residual_histogram(result.reports, out / "residuals.png")]
    for name, lat in result.extras.get("lattices", {}).items():
        paths.append(hasse_diagram(lat, out / f"hasse_{name}.png", f"face lattice of {name}"))
    if "canonical" in result.extras:
        paths.append(r5_faces(result.extras["canonical"], out / "r5_faces.png"))
        paths.append(r5_factors(out / "r5_factors.png"))
    # the chart picture is real; "all" runs sections over R when O is selected
    if "axioms" in result.extras and result.config.field in ("R", "O"):
        body = e11_section("R", 3)
        rng = np.random.default_rng([result.config.seed, 11])
        faces, labels, _ = sec.sample_parallel_faces(body, rng, 30, 5)
        paths.append(section_lines(body, faces, labels, out / "section_lines.png"))
    return paths
