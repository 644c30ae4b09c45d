#!/usr/bin/env python3
"""The two law families: loss over (size, data) and performance over
(layers, width, data parameter).

The loss law is the familiar additive power-decay surface; this script
evaluates it with a widely used set of fitted constants. The performance
law adds logarithmic growth plus a power decay per group, which is what
lets it have an interior optimum: past some width, more embedding hurts.
"""

import numpy as np

from perflaw import (
    LossLawParams,
    PerfLawParams,
    eval_loss_law,
    eval_perf_law,
    loss_to_performance,
)

print("=== simplified loss law with well-known fitted constants ===")
loss_params = LossLawParams.simplified(E=1.61, A=406.4, B=410.7, alpha=0.34, beta=0.28)
print("  L(n, d) = E + A/n^alpha + B/d^beta,", loss_params.to_dict())
print(f"\n  {'n':>10} {'d':>12} {'loss':>8}")
for n, d in [(1e7, 1e9), (1e9, 1e9), (1e9, 1e11), (1e11, 1e13)]:
    print(f"  {n:>10.0e} {d:>12.0e} {eval_loss_law(loss_params, n, d):>8.4f}")
print(f"  floor (E): {loss_params.E}")

print("\n=== linearized metric: performance = 1 - k * loss ===")
for loss in (3.2, 2.5, 1.61):
    print(f"  k=0.2, loss {loss:.2f} -> performance {loss_to_performance(0.2, loss):.4f}")

print("\n=== performance law: interior optimum in width ===")
perf = PerfLawParams(
    w1=0.04, p1=2.0, w3=0.6,      # layers group: log growth + decaying bonus
    w2=-0.03, p2=4.0, w4=0.8,     # width group: negative log slope, decaying penalty
    w6=1.0, p3=1.5, w5=0.5,       # data group, canonical unit coefficient
    C=-13.7,
)
d_prime = 1.3e6
widths = np.array([8, 16, 32, 64, 128, 256, 512], dtype=float)
values = eval_perf_law(perf, 8.0, widths, d_prime)
print(f"  at 8 layers, D' = {d_prime:,.0f}:")
for d, v in zip(widths, values):
    bar = "#" * int((v - values.min()) * 400)
    print(f"    width {int(d):>4}  {v:.4f}  {bar}")
best = widths[np.argmax(values)]
print(f"  best width on this slice: {int(best)}")

print("\n=== more quality-adjusted data shifts the whole surface up ===")
for dp in (1e6, 3e6, 9e6):
    v = eval_perf_law(perf, 8.0, 64.0, dp)
    print(f"  D' {dp:>9,.0f} -> predicted metric {v:.4f}")
