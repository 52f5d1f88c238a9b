"""Smoke test for the pdnet_py extension.

Builds the bindings with cargo (release), loads the shared library and
exercises the main entry points.

    python3 python/smoke_test.py
"""

import importlib.util
import math
import pathlib
import shutil
import subprocess
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "pdnet-python"],
        cwd=ROOT,
        check=True,
    )
    lib_dir = ROOT / "target" / "release"
    candidates = [lib_dir / "libpdnet_py.so", lib_dir / "libpdnet_py.dylib", lib_dir / "pdnet_py.dll"]
    built = next(p for p in candidates if p.exists())
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    dest = pathlib.Path(tempfile.mkdtemp()) / f"pdnet_py{suffix}"
    shutil.copy(built, dest)
    spec = importlib.util.spec_from_file_location("pdnet_py", dest)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    pd = load_module()

    g = pd.Graph.grid_torus(50, 50)
    assert (g.node_count(), g.edge_count()) == (2500, 10000)
    assert len(g.neighbors(0)) == 8
    vn = pd.Graph.grid_torus(40, 25, "von_neumann")
    assert vn.edge_count() == 2000

    er = pd.Graph.generate("erdos_renyi", seed=7, n=1000, edges=8000)
    assert er.edge_count() == 8000
    again = pd.Graph.from_edge_list(er.to_edge_list())
    assert again.edges() == er.edges()
    try:
        pd.Graph.generate("ring_lattice", n=10, k=12)
    except ValueError:
        pass
    else:
        raise AssertionError("infeasible ring accepted")

    assert pd.aggregate_payoffs(3, 2, 1, 2) == [265.0, 0.0, 100.0, 200.0]
    table = pd.PayoffParams.preset("table")
    assert (table.beta, table.gamma) == (50.0, 15.0)

    phi = pd.coexistence_value([269.1, 201.2, 335.2, 194.4])
    assert abs(phi - 243.7) < 0.1, phi

    t, df, p = pd.welch_t([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0])
    assert (t, p) == (0.0, 1.0)
    t, df, p = pd.welch_t([10.0, 11.0, 12.0], [1.0, 2.0, 3.0])
    assert t > 0 and p < 0.01 and pd.significance_flag(p) == "*"

    sim = pd.Simulation(g, p=1.0, mu=0.01, seed=3)
    sim.step(500)
    counts, value = sim.census()
    assert sim.tick == 500 and sum(counts) == 2500
    assert len(sim.strategies()) == 2500 and set(sim.strategies()) <= set("CDLP")
    ppm = sim.render_ppm()
    assert ppm.startswith("P3\n50 50\n255\n")
    assert math.isfinite(value)

    small = pd.Graph.grid_torus(10, 10)
    csv = pd.sweep(small, [1.0], [0.0, 0.01], replications=3, ticks=100)
    lines = csv.strip().splitlines()
    assert lines[0].startswith("p,mu,coop_mean") and len(lines) == 3

    print("pdnet_py smoke test passed:", g, f"loners={counts[2]}", f"phi={value:.1f}")


if __name__ == "__main__":
    sys.exit(main())
