"""Figure rendering for the CLI report paths.

Each function takes the already-computed row data, draws one figure
and writes it to the requested file; the delimited output remains the
primary artifact.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_sweep(rows, path):
    """Spectral radius versus smoothing steps, one curve per family."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    families = {}
    for family, alpha, m, rho in rows:
        key = (family, alpha)
        families.setdefault(key, []).append((m, rho))
    for (family, alpha), pts in families.items():
        pts.sort()
        ms = [p[0] for p in pts]
        rhos = [p[1] for p in pts]
        if family == "constant":
            ax.semilogy(ms, rhos, color="0.6", lw=0.8)
        elif family == "constant-2/3":
            ax.semilogy(ms, rhos, "k--", lw=1.2, label="constant 2/3")
        else:
            ax.semilogy(ms, rhos, "o-", color="C0", lw=2.0, label="closed-form schedule")
    ax.set_xlabel("smoothing steps m")
    ax.set_ylabel(r"spectral radius of the error operator")
    ax.legend(loc="upper right", frameon=False)
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)


def render_fov(operators, path):
    """Field-of-values boundaries with eigenvalue scatter per operator."""
    count = len(operators)
    fig, axes = plt.subplots(1, count, figsize=(3.4 * count, 3.4))
    if count == 1:
        axes = [axes]
    for ax, (tag, boundary, eigs) in zip(axes, operators):
        pts = list(boundary.points) + [boundary.points[0]]
        ax.plot([p.real for p in pts], [p.imag for p in pts], "-", lw=1.0, color="C0")
        ax.plot(eigs.real, eigs.imag, "k.", ms=4)
        ax.axhline(0.0, color="0.85", lw=0.5)
        ax.axvline(0.0, color="0.85", lw=0.5)
        ax.set_title(tag)
        ax.set_aspect("equal", adjustable="datalim")
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)


def render_cluster(report, path):
    """Eigenvalues in the complex plane with the cluster centers."""
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    eigs = report.eigenvalues
    ax.plot(eigs.real, eigs.imag, "k.", ms=5, label="eigenvalues")
    for center in report.cluster_centers:
        ax.plot(center.real, center.imag, "rx", ms=10, mew=2)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title(f"max deviation {report.max_deviation:.2e}")
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)


def render_response(samples, path):
    """Scalar response values over the sampled coupling eigenvalues."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.6))
    lams = [s.lam for s in samples]
    vals = [s.value for s in samples]
    sc = ax1.scatter([z.real for z in lams], [z.imag for z in lams],
                     c=[abs(v) for v in vals], s=14, cmap="viridis")
    fig.colorbar(sc, ax=ax1, label="|r_m|")
    ax1.set_xlabel("Re lambda")
    ax1.set_ylabel("Im lambda")
    ax2.plot([abs(z) for z in lams], [abs(v) for v in vals], "k.", ms=4)
    ax2.set_xlabel("|lambda|")
    ax2.set_ylabel("|r_m|")
    fig.tight_layout()
    fig.savefig(path, bbox_inches="tight", dpi=150)
    plt.close(fig)
