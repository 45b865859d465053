"""Run the algorithm comparison and planning-step sweep on the 39x36 scenario.

Writes CSV/JSON outputs under --out and, if matplotlib is installed, two PNG
plots of the mean learning curves.

    python scripts/reproduce_figures.py --seed 1 --out results/figures
"""
import argparse
from pathlib import Path

from dynah.cli import main as cli_main


def read_mean(csv_path: Path) -> list[float]:
    lines = [ln for ln in csv_path.read_text().splitlines() if not ln.startswith("#")]
    col = lines[0].split(",").index("mean")
    return [float(ln.split(",")[col]) for ln in lines[1:]]


def plot(series: dict, title: str, path: Path) -> None:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping", path.name)
        return
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, ys in series.items():
        ax.plot(range(1, len(ys) + 1), ys, label=label)
    ax.set_yscale("log")
    ax.set_xlabel("episode")
    ax.set_ylabel("mean steps per episode")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    print("wrote", path)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", default="1")
    ap.add_argument("--runs", default="30")
    ap.add_argument("--episodes", default="100")
    ap.add_argument("--jobs", default="1")
    ap.add_argument("--out", default="results/figures")
    args = ap.parse_args()
    out = Path(args.out)
    common = ["--seed", args.seed, "--runs", args.runs, "--episodes", args.episodes, "--jobs", args.jobs]

    if cli_main(["compare", *common, "--planning-steps", "10", "--out", str(out / "compare")]):
        raise SystemExit(1)
    if cli_main(["sweep", *common, "--values", "1,5,10,25", "--out", str(out / "sweep")]):
        raise SystemExit(1)

    plot({k: read_mean(out / "compare" / f"{k}.csv") for k in ("qlearning", "dynaq", "dynah")},
         "Q-learning vs Dyna-Q vs Dyna-H (N=10)", out / "compare.png")
    plot({f"N={n}": read_mean(out / "sweep" / f"dynah_N{n}.csv") for n in (1, 5, 10, 25)},
         "Dyna-H planning steps", out / "sweep.png")


if __name__ == "__main__":
    main()
