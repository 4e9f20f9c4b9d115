"""
Can the experiment ever tell unitary evolution from collapse?
=============================================================

The flip-all-spins observable <M> is nonzero only if the global
superposition survives.  But the signal that survives a real clock is
e^-K, while every analyser in the string is misaligned by at least the
angle floor dtheta -- which feeds a systematic error floor.  Once
e^-K sinks below that floor, the question becomes undecidable.
"""

import json
import math
import pathlib

from spinchamber import (
    EnvSpin,
    ExperimentConfig,
    QubitState,
    decide,
    decide_local,
    feasibility_check,
    undecidability_crossover,
)

ISQ2 = 1.0 / math.sqrt(2.0)

sample = pathlib.Path(__file__).parent / "configs" / "sample.json"
doc = json.loads(sample.read_text())
cfg = ExperimentConfig.from_json_dict(doc["experiment"])

print("=== is the setup even coherent enough to run? ===")
def show_feasibility(config):
    rep = feasibility_check(config)
    for cond in rep.conditions:
        status = {True: "ok", False: "FAIL", None: "info"}[cond.passed]
        margin = (
            "" if cond.margin_log10 is None else f"  margin {cond.margin_log10:+.1f} dec"
        )
        print(f"  [{status:>4}] {cond.name:<11} value {cond.value:.3e}{margin}")


print("sample config (made-up weak moments -- the checks catch it):")
show_feasibility(cfg)
print()
print("electron moments a nanometre apart couple strongly -- but a free")
print("wavepacket spreads way past a nanometre in a microsecond, so the")
print("dispersion check is the one that bites:")
realistic = ExperimentConfig(
    central=QubitState(ISQ2, ISQ2),
    env=(EnvSpin(QubitState(1.0, 0.0), 1.0e4),),
    B=1.0,
    gamma1=9.2740100783e-24,
    gamma2=4.6370050392e-24,
    tau=1e-6,
    T_total=1e-5,
    m=9.1093837015e-31,
    d=1e-9,
)
show_feasibility(realistic)

print()
print("=== global verdict for the sample config ===")
v = decide(cfg, None, doc["dtheta"])
print(f"signal e^-K      : 10^{v.signal.log10_mag:+.3f}")
print(f"error floor      : 10^{v.floor.log10_mag:+.3f}")
print(f"verdict          : {v.verdict}  (margin {v.margin_log10:+.1f} decades)")

print()
print("=== local readout: watching only the central spin ===")
print("balanced environment spins, f*tau = 0.3, analyser tilt 1e-2")
plus = QubitState(ISQ2, ISQ2)
previous = None
for n in list(range(1, 8)) + list(range(40, 50)):
    c = ExperimentConfig.from_frequencies(plus, [plus] * n, f=0.3, omega1=100.0)
    lv = decide_local(c, 1e-2)
    mark = ""
    if previous and previous != lv.verdict:
        mark = "   <-- verdict flips here"
    previous = lv.verdict
    print(
        f"  N = {n:>2}: signal 10^{lv.signal.log10_mag:+8.3f}"
        f"  floor 10^{lv.floor.log10_mag:+8.3f}  {lv.verdict}{mark}"
    )

print()
print("=== how many spins until undecidability is guaranteed? ===")
print("electron-like moments, dtheta = 1e-62 (the universe-scale floor)")
electron = ExperimentConfig(
    central=plus,
    env=(),
    B=1.0,
    gamma1=9.2740100783e-24,
    gamma2=9.2740100783e-24,
    tau=1e-6,
    T_total=1e-6,
    m=9.1093837015e-31,
    d=1e-9,
)
res = undecidability_crossover(electron, 1e-62, n_max=2 * 10**7)
print(f"N^5-bound model crossover: N* = {res.n_star_bound_model:,}")
print("a hopelessly modest environment, by mesoscopic standards.")

print()
print("the per-config model (n_star_direct_model) has no such crossover:")
print("its exponent and the floor's are both linear in N, so adding spins")
print("never tips the comparison -- N* is 1 or None.  Tipping it per spin")
print("takes wildly unphysical frequencies or window lengths:")
for tau, label in ((1e-6, "microsecond windows"), (1.0, "second-long windows")):
    fast = ExperimentConfig.from_frequencies(
        plus, [plus], f=1.0e4, omega1=3.0e30, omega2=1.0e30, tau=tau
    )
    r = undecidability_crossover(fast, 1e-2, n_max=10**6)
    print(f"  omega ~ 1e30 rad/s, {label:<19}: N* = {r.n_star_direct_model}")
