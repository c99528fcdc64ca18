import time
import pandas as pd

from src.common.config import load_config
from src.common.logging_utils import setup_logging
from src.scenarios.runner import ScenarioConfig, run_scenario

# -----------------------------
# SCENARIOS TO TIME
# -----------------------------
# deterministic scenarios only; the Monte Carlo ones are timed on request
BENCH_SCENARIOS = ["fig2b", "fig2d", "fig3a", "fig3b", "fig4a", "fig4b", "figS5", "sm_sensitivity"]


# -----------------------------
# BENCHMARK FUNCTION
# -----------------------------
def benchmark_scenarios(cfg, scenarios, seed=None):
    records = []
    for name in scenarios:
        config = ScenarioConfig.from_dict({"scenario": name, "seed": seed or cfg["run"]["seed"]}, cfg)
        start = time.perf_counter()
        result, _ = run_scenario(config, cfg)
        elapsed = time.perf_counter() - start
        rows = sum(len(df) for df in result.curves.values())
        print(f"[clockinterf] {name}: {elapsed:.4f}s, rows: {rows}")
        records.append({"scenario": name, "seconds": float(elapsed), "rows": rows})
    return records


# -----------------------------
# MAIN
# -----------------------------
if __name__ == "__main__":
    cfg = load_config()
    setup_logging("clockinterf", "WARNING")
    df = pd.DataFrame(benchmark_scenarios(cfg, BENCH_SCENARIOS))

    print("\nBenchmark Results:")
    print(df)

    df.to_csv("benchmark_scenarios.csv", index=False)
    print("✅ CSV saved: benchmark_scenarios.csv")
