#!/usr/bin/env python3
"""Run the bundled fingering experiments end to end.

For each requested melody this trains the Q-network with the bundled
baseline config, rolls out the greedy policy, compares it against the
exact optimum, and writes per-episode history CSVs plus fingering files
under --out-dir.  Finishes with a summary table.

Typical use:
    python3 scripts/run_experiments.py --out-dir results
    python3 scripts/run_experiments.py --experiments EX2 EX4 --seed 1
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from pianofinger.experiments import (  # noqa: E402
    EXPERIMENT_IDS,
    build_experiment,
    default_train_config,
    export_fingering,
    export_history,
    run,
)
from pianofinger.oracle import count_position_changes  # noqa: E402


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--experiments", nargs="+", default=list(EXPERIMENT_IDS),
                        choices=EXPERIMENT_IDS, metavar="EXn",
                        help="which melodies to run (default: all five)")
    parser.add_argument("--seed", type=int, default=0, help="training seed")
    parser.add_argument("--out-dir", default="results",
                        help="directory for CSVs and fingering files")
    args = parser.parse_args(argv)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for exp_id in args.experiments:
        spec = build_experiment(exp_id)
        config = default_train_config(exp_id, seed=args.seed)
        print(f"{exp_id}: {len(spec.score)} notes, {config.episodes} episodes, "
              f"encoding={spec.encoding} ...", flush=True)
        result = run(spec, config)

        export_history(result.records,
                       out_dir / f"{exp_id}_history_seed{args.seed}.csv")
        export_fingering(spec.score, result.fingering,
                         out_dir / f"{exp_id}_fingering_seed{args.seed}.txt")
        export_fingering(spec.score, result.oracle_fingering,
                         out_dir / f"{exp_id}_oracle.txt")

        try:
            changes = count_position_changes(spec.score, result.fingering)
        except Exception:
            changes = "n/a"   # rollout contains an infeasible transition
        rows.append((exp_id, result.oracle_total, result.total_reward,
                     result.gap, changes))

    print()
    print(f"{'melody':<8}{'oracle':>8}{'rollout':>9}{'gap':>7}{'changes':>9}")
    for exp_id, oracle, total, gap, changes in rows:
        print(f"{exp_id:<8}{oracle:>8.1f}{total:>9.1f}{gap:>7.1f}{changes!s:>9}")
    print(f"\nwrote CSVs and fingerings to {out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
