#!/usr/bin/env python3
"""Fit the raw chain parameters of the "paper" preset.

Only derived magnitudes are known for the microtubule chain (sound velocity,
kink velocity, kink energy, effective mass, mobile charge). This script
solves a least-squares problem in log10 space for the raw parameters
(M, A, B, k, R0, gamma, E) so that:

  v0          = sqrt(k/M) R0                        -> 1e3  m/s
  v           = v0 [1 + 2 g^2/(9 d^2 M v0^2)]^-1/2  -> 2    m/s
  v (self-consistent, M|A| in place of M v0^2)      -> 2    m/s
  Delta       = (2 sqrt2/3) A^2/B + (sqrt2/3) k A/B -> 1    eV
  M*          = 4/(3 sqrt2) M A alpha(v)/(R0 B)     -> 5e-27 kg
  sigma       = q sqrt(B) A^-3/2 E                  -> 3e-3

q = 36 e is fixed. Requiring both velocity formulas to agree pins A = v0^2
numerically; sigma = 3e-3 keeps the 100x "strong-field" preset inside the
three-real-root regime (sigma = 0.3 < 2/(3 sqrt3)). Weak priors on the dimer
mass and spacing remove the remaining null direction. The resulting values
are rounded to 6 significant digits and frozen in
crates/core/src/units.rs and presets/paper.conf.
"""
import numpy as np
from scipy.optimize import least_squares

E_CHARGE = 1.602176634e-19
EV = E_CHARGE
Q = 36 * E_CHARGE


def middle_root(sigma):
    r = np.sort(np.roots([1.0, 0.0, -1.0, -sigma]).real)
    return r[1]


def observables(p):
    M, A, B, k, R0, g, E = 10.0 ** p
    v0 = np.sqrt(k / M) * R0
    sigma = Q * np.sqrt(B) * A ** -1.5 * E
    d = middle_root(sigma)
    v_paper = v0 / np.sqrt(1 + 2 * g**2 / (9 * d**2 * M * v0**2))
    v_cons = v0 / np.sqrt(1 + 2 * g**2 / (9 * d**2 * M * A))
    alpha = np.sqrt(A / (M * (v0**2 - v_paper**2)))
    delta = (2 * np.sqrt(2) / 3) * A**2 / B + (np.sqrt(2) / 3) * k * A / B
    mstar = 4 / (3 * np.sqrt(2)) * M * A * alpha / (R0 * B)
    return v0, v_paper, v_cons, delta, mstar, sigma


TARGETS = np.log10([1e3, 2.0, 2.0, 1.0 * EV, 5e-27, 3e-3])
PRIOR_M, PRIOR_R0 = np.log10(1.8e-22), np.log10(8e-9)
PRIOR_WEIGHT = 1e-3


def residuals(p):
    obs = np.log10(observables(p))
    prior = PRIOR_WEIGHT * np.array([p[0] - PRIOR_M, p[4] - PRIOR_R0])
    return np.concatenate([obs - TARGETS, prior])


def main():
    x0 = np.log10([1e-20, 1e6, 1e34, 1e9, 1e-12, 1e-5, 1e2])
    sol = least_squares(residuals, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    names = ["M", "A", "B", "k_stiff", "R0", "gamma", "E_field"]
    vals = [float(f"{v:.6g}") for v in 10.0 ** sol.x]
    for n, v in zip(names, vals):
        print(f"{n} = {v:.6e}")
    v0, vp, vc, delta, mstar, sigma = observables(np.log10(vals))
    print(f"# v0={v0:.6g} v_paper={vp:.6g} v_consistent={vc:.6g} "
          f"Delta_eV={delta / EV:.6g} M_star={mstar:.6g} sigma={sigma:.6g}")


if __name__ == "__main__":
    main()
