"""Smoke test for the euler_inflow extension.

Build it first:
    cargo build --release -p euler-inflow-py --features extension-module
then run `python3 python/smoke_test.py`.
"""
import importlib.util
import math
import pathlib
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_extension():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libeuler_inflow_py.so"
        if lib.exists():
            spec = importlib.util.spec_from_file_location("euler_inflow", lib)
            mod = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(mod)
            return mod
    sys.exit("libeuler_inflow_py.so not found; build the extension first")


def main():
    ei = load_extension()
    assert ei.CONFIG_VERSION == 1

    cfg = ei.Config.load(ROOT / "configs" / "perturbed.toml")
    assert cfg.mode == "inflow-outflow" and cfg.grid == (8, 8, 9)
    again = ei.Config.from_toml(cfg.to_toml())
    assert again.grid == cfg.grid and again.seed == cfg.seed

    try:
        ei.Config.from_toml(cfg.to_toml().replace("version = 1", "version = 5"))
    except ei.InvalidConfig:
        pass
    else:
        raise AssertionError("bad version accepted")

    compat = ei.check_compat(cfg)
    assert compat["cond0"] and compat["cond1_velocity"], compat

    sol = ei.solve(cfg)
    assert sol.converged, sol.report()["iterations"][-1]
    nt1, comps, n3, n2, n1 = sol.shape
    assert (nt1, comps) == (cfg.nt + 1, 3)
    u0 = sol.velocity(0)
    assert len(u0) == 3 * n1 * n2 * n3 and all(math.isfinite(v) for v in u0)
    assert len(sol.pressure(nt1 - 1)) == n1 * n2 * n3
    print(f"perturbed: {sol.iterations} iterations, residual {sol.momentum_residual:.3e}")

    steady = ei.solve(ei.Config.steady(8))
    assert steady.iterations == 1 and steady.momentum_residual < 1e-10

    with tempfile.TemporaryDirectory() as d:
        sol.write(d, ["raw"])
        assert (pathlib.Path(d) / "velocity.f64").stat().st_size == nt1 * 3 * n1 * n2 * n3 * 8
        assert (pathlib.Path(d) / "iterations.csv").exists()

    rows = ei.run_mms("pressure-z")
    assert rows[-1]["order"] > 1.9, rows
    print("smoke test ok")


if __name__ == "__main__":
    main()
