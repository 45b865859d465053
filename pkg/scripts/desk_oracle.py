"""Compare Dyna-H greedy rollouts against A* on small random mazes.

    python scripts/desk_oracle.py --runs 100 --episodes 500
"""
import argparse

from dynah.experiment import ExperimentConfig, run_experiment
from dynah.gridworld import Position
from dynah.rl_core import AgentConfig, AgentKind


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--agent", default="dynah", choices=[k.value for k in AgentKind])
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--episodes", type=int, default=500)
    ap.add_argument("--size", type=int, default=8)
    ap.add_argument("--planning-steps", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    n = args.size
    cfg = ExperimentConfig(agent=AgentKind(args.agent), runs=args.runs, episodes=args.episodes,
                           height=n, width=n, start=Position(0, 0), goal=Position(n - 1, n - 1),
                           master_seed=args.seed,
                           agent_config=AgentConfig(planning_steps=args.planning_steps))
    recs = run_experiment(cfg, jobs=args.jobs).summary.records
    equal = sum(r.greedy_length == r.optimal_length and not r.greedy_capped for r in recs)
    loops = sum(r.greedy_capped for r in recs)
    print(f"{args.agent}: greedy == A* on {equal}/{len(recs)}, looping rollouts {loops}")


if __name__ == "__main__":
    main()
