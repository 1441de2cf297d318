"""How many modes does a chaotic PDE field actually occupy?

PCA on a snapshot record answers with the singular value spectrum: the
cumulative energy curve tells you the dimension of the subspace that
carries almost all the variance, and the projection error on held-out
columns tells you whether that subspace generalizes beyond the fitting
window. Both go into choosing the latent dimension r for model learning.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from chaosrom import KsConfig, fit_pca, projection_error, simulate_ks

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

# 1. A snapshot record on the small chaotic box, transient dropped.
cfg = KsConfig(domain_length=22.0, n_grid=64, dt=0.25, t_final=500.0)
record = simulate_ks(cfg)
Q = record.data[:, 200:]
fit, holdout = Q[:, :1000], Q[:, 1000:]

# 2. Fit at a 99.99 % energy threshold and check generalization.
basis = fit_pca(fit, energy=0.9999)
err_fit = projection_error(fit, basis)
err_out = projection_error(holdout, basis)
print(f"r = {basis.r} modes reach 99.99 % energy")
print(f"projection error: fit {err_fit:.2e}, holdout {err_out:.2e}")

# 3. Spectrum and cumulative energy.
energies = basis.singular_values**2
cume = np.cumsum(energies) / np.sum(energies)
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.semilogy(np.arange(1, energies.size + 1), basis.singular_values,
             marker=".", color="tab:blue")
ax1.set_xlabel("mode")
ax1.set_ylabel("singular value")
ax2.plot(np.arange(1, cume.size + 1), cume, color="tab:blue")
ax2.axvline(basis.r, linestyle="--", color="black", label=f"r = {basis.r}")
ax2.set_xlabel("mode")
ax2.set_ylabel("cumulative energy")
ax2.set_ylim(0.4, 1.02)
ax2.legend(loc="lower right")
fig.tight_layout()
path = os.path.join(OUT, "pca_energy.svg")
fig.savefig(path, format="svg", metadata={"Date": None})
print(f"wrote {path}")
