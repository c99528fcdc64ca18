import argparse
import os

from src.common.config import load_config
from src.common.logging_utils import setup_logging
from src.common.seeding import DEFAULT_SEED
from src.scenarios.runner import SCENARIO_IDS, ScenarioConfig, run_scenario


def reproduce_all(out_dir, seed, formats, scenarios=SCENARIO_IDS):
    cfg = load_config()
    written = []
    for sid in scenarios:
        doc = {"scenario": sid, "seed": seed, "outputs": {"formats": list(formats)}}
        _, paths = run_scenario(ScenarioConfig.from_dict(doc, cfg), cfg, out_dir)
        written.extend(paths)
    return written


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Regenerate every scenario artifact into one folder.")
    parser.add_argument("--out", default="results")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--svg", action="store_true", help="also write SVG quick-look plots")
    parser.add_argument("--skip", nargs="*", default=[], help="scenario ids to leave out")
    args = parser.parse_args()

    setup_logging("clockinterf", "INFO")
    os.makedirs(args.out, exist_ok=True)
    formats = ("csv", "json", "svg") if args.svg else ("csv", "json")
    paths = reproduce_all(args.out, args.seed, formats, [s for s in SCENARIO_IDS if s not in args.skip])
    if paths:
        print(f"✅ {len(paths)} artifacts written to {args.out}")
    else:
        print("⚠️ Nothing written.")
