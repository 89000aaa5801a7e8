"""The shape of the implication penalty over the probability square.

The penalty takes the predicted probability of the sufficient
proposition (p) and of the necessary proposition (q).  It is near zero
whenever p is small or q is large, grows as the model becomes confident
about the sufficient side while doubting the necessary side, and
diverges in the corner p -> 1, q -> 0.  Inputs are clamped away from 0
and 1 so training code survives saturated probabilities.
"""

from pathlib import Path

import numpy as np

from conqa import EPSILON, consistency_loss, consistency_loss_grad

# A coarse look at the surface.
ps = np.array([0.05, 0.25, 0.50, 0.75, 0.95])
qs = np.array([0.05, 0.25, 0.50, 0.75, 0.95])
print("penalty L(p, q); rows are p (sufficient), columns q (necessary):")
print("        " + "".join(f"q={q:<7.2f}" for q in qs))
for p in ps:
    row = consistency_loss(np.full_like(qs, p), qs)
    print(f"p={p:.2f}  " + "".join(f"{v:<9.3f}" for v in row))

# The two easy corners: a doubted sufficient side or a certain
# necessary side makes the implication impossible to violate, and the
# penalty collapses to the clamp floor.
floor = 2.0 * EPSILON * abs(np.log(EPSILON))
print(f"\nL(0.0, 0.3) = {consistency_loss(0.0, 0.3):.2e}  (floor {floor:.2e})")
print(f"L(0.4, 1.0) = {consistency_loss(0.4, 1.0):.2e}")

# The hard corner diverges like |ln epsilon|.
print(f"L(1.0, 0.5) = {consistency_loss(1.0, 0.5):.3f}  (|ln eps| = {abs(np.log(EPSILON)):.3f})")

# The gradient always pushes the same way: down on the sufficient
# probability, up on the necessary one.  That is the whole training
# signal - soften the strong claim or commit to the weak one.
g_p, g_q = consistency_loss_grad(0.9, 0.2)
print(f"\ngrad at (0.9, 0.2): dL/dp = {g_p:+.3f}, dL/dq = {g_q:+.3f}")
g_p, g_q = consistency_loss_grad(0.5, 0.5)
print(f"grad at (0.5, 0.5): dL/dp = {g_p:+.3f}, dL/dq = {g_q:+.3f}")

# Optional picture; the demo works without matplotlib.
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    grid = np.linspace(0.01, 0.99, 200)
    p_grid, q_grid = np.meshgrid(grid, grid, indexing="ij")
    surface = consistency_loss(p_grid.ravel(), q_grid.ravel()).reshape(p_grid.shape)
    fig, ax = plt.subplots(figsize=(5, 4))
    image = ax.imshow(
        surface,
        origin="lower",
        extent=(0.01, 0.99, 0.01, 0.99),
        aspect="auto",
        cmap="viridis",
    )
    ax.set_xlabel("q (necessary)")
    ax.set_ylabel("p (sufficient)")
    ax.set_title("implication penalty")
    fig.colorbar(image, ax=ax, label="L(p, q)")
    fig.tight_layout()
    out = Path(__file__).with_name("loss_surface.png")
    fig.savefig(out, dpi=120)
    print(f"\nwrote {out}")
else:
    print("\nmatplotlib not installed; skipped the surface plot")
