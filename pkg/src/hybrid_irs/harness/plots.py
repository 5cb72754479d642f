"""Static SVG renderings of the harness CSVs (convenience only; the CSVs are the contract)."""
from collections import defaultdict

from .experiments import read_csv

LABELS = {
    "fp": "Max-SNR-FP",
    "ear": "Max-SNR-EAR",
    "active": "active IRS",
    "passive": "passive IRS",
    "random": "random phase IRS",
    "none": "no IRS",
}


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4.2))
    return plt, fig, ax


def _save(plt, fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def render(spec, written):
    out = {}
    if "convergence" in written:
        _, rows = read_csv(written["convergence"])
        plt, fig, ax = _figure()
        curves = defaultdict(list)
        for r in rows:
            curves[(r["algorithm"], float(r["P_dBm"]))].append((int(r["iteration"]), float(r["rate"])))
        for (algo, P), pts in sorted(curves.items()):
            ax.plot(*zip(*pts), marker="o", label=f"{LABELS[algo]}, P={P:g} dBm")
        ax.set_xlabel("iteration")
        ax.set_ylabel("achievable rate (bit/s/Hz)")
        ax.legend()
        out["convergence_svg"] = _save(plt, fig, spec.output_dir / "convergence.svg")
    if "rate_vs_m" in written:
        _, rows = read_csv(written["rate_vs_m"])
        plt, fig, ax = _figure()
        curves = defaultdict(list)
        for r in rows:
            curves[r["algorithm"]].append((int(r["M"]), float(r["rate"])))
        for algo, pts in curves.items():
            ax.plot(*zip(*sorted(pts)), marker="o", label=LABELS[algo])
        ax.set_xlabel("number of IRS elements M")
        ax.set_ylabel("achievable rate (bit/s/Hz)")
        ax.legend()
        out["rate_vs_m_svg"] = _save(plt, fig, spec.output_dir / "rate_vs_m.svg")
    if "complexity_vs_m" in written:
        _, rows = read_csv(written["complexity_vs_m"])
        plt, fig, ax = _figure()
        Ms = [int(r["M"]) for r in rows]
        ax.semilogy(Ms, [float(r["flops_fp"]) for r in rows], marker="o", label=LABELS["fp"])
        ax.semilogy(Ms, [float(r["flops_ear"]) for r in rows], marker="s", label=LABELS["ear"])
        ax.set_xlabel("number of IRS elements M")
        ax.set_ylabel("FLOPs")
        ax.legend()
        out["complexity_vs_m_svg"] = _save(plt, fig, spec.output_dir / "complexity_vs_m.svg")
    return out
