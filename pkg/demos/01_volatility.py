"""
Volatility modelling with GARCH(1,1)
====================================

Simulate a return series with known parameters, fit it back by maximum
likelihood and look at how a shock feeds into tomorrow's variance.
"""

from __future__ import annotations

import numpy as np

from newsvol.synthetic import simulate_garch
from newsvol.volatility import ArchParams, arch_variance, fit_garch11, garch_filter, news_impact_curve

# A series with omega=0.05, alpha=0.10, beta=0.80: persistence 0.9, so a
# shock loses about 10% of its effect on variance every day.
rng = np.random.default_rng(0)
eps = simulate_garch(5000, 0.05, 0.10, 0.80, rng)
print(f"simulated {eps.size} shocks, sample variance {eps.var():.3f} (unconditional 0.5)")

# Fit it back.
m = fit_garch11(eps)
print(f"fitted omega={m.omega:.4f} alpha={m.alpha:.4f} beta={m.beta:.4f} persistence={m.persistence:.4f}")

# Filtered conditional variances: quiet and turbulent stretches are visible.
h = garch_filter(m, eps, h0=float(eps.var()))
print(f"conditional variance ranges from {h.min():.3f} to {h.max():.3f}")

# ARCH(2) by hand: omega + a1 * eps_{t-1}^2 + a2 * eps_{t-2}^2
print("ARCH(2) variance:", arch_variance(ArchParams(0.1, (0.3, 0.2)), [1.0, 2.0]))

# News impact curve: a symmetric parabola around zero.
for e, var in news_impact_curve(m, m.uncond_var, [-3, -1, 0, 1, 3]):
    print(f"  shock {e:+.0f} -> next variance {var:.3f}")

# How fast does a shock fade? Its weight after i days is persistence**i.
print("decay weights:", " ".join(f"{m.persistence ** i:.3f}" for i in range(6)))
