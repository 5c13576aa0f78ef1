#!/usr/bin/env python3
"""Compare the two state encodings on the up-down scale melody.

Trains paired seeds with full-keyboard one-hots (181 inputs) and with
melodic-range one-hots (21 inputs for this melody) and reports, per
seed, the first episode whose greedy policy reaches the exact optimum.
The small encoding should converge no later in the median.

    python3 scripts/compare_encodings.py
    python3 scripts/compare_encodings.py --episodes 200 --seeds 10
"""

import argparse
import statistics
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from pianofinger.agent import TrainConfig, greedy_rollout, train  # noqa: E402
from pianofinger.env import FingeringEnv, StateEncoding  # noqa: E402
from pianofinger.experiments import build_experiment  # noqa: E402
from pianofinger.oracle import dp_optimal  # noqa: E402


def first_hit_episode(env, config, target_total):
    hits = []

    def hook(episode, net):
        if not hits and greedy_rollout(net, env)[1] == target_total:
            hits.append(episode)

    train(env, config, episode_hook=hook)
    return hits[0] if hits else None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--episodes", type=int, default=100)
    parser.add_argument("--seeds", type=int, default=5, help="number of paired seeds")
    args = parser.parse_args(argv)

    score = build_experiment("EX2").score
    _, best = dp_optimal(score)
    encodings = {
        "melodic-range": StateEncoding.for_score(score),
        "full-keyboard": StateEncoding.full_piano(),
    }

    print(f"target: greedy total {best:g} within {args.episodes} episodes\n")
    print(f"{'encoding':<15}{'dim':>5}  episodes-to-optimum per seed")
    medians = {}
    for label, encoding in encodings.items():
        env = FingeringEnv(score, encoding=encoding)
        firsts = []
        for seed in range(args.seeds):
            hit = first_hit_episode(env, TrainConfig(episodes=args.episodes, seed=seed),
                                    best)
            firsts.append(float("inf") if hit is None else hit)
        medians[label] = statistics.median(firsts)
        pretty = " ".join("-" if f == float("inf") else f"{f:g}" for f in firsts)
        print(f"{label:<15}{encoding.dim:>5}  [{pretty}]  median {medians[label]:g}")

    print()
    if medians["melodic-range"] <= medians["full-keyboard"]:
        print("melodic-range encoding converged no slower (as expected)")
        return 0
    print("full-keyboard encoding converged faster on this budget")
    return 1


if __name__ == "__main__":
    sys.exit(main())
