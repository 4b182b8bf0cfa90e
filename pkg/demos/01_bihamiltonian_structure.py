"""Two Hamiltonians, one flow.

The fourth-order oscillator q'''' + alpha q'' + beta q = 0 lives on a
four-dimensional phase space. Its textbook energy H1 is unbounded (linear in
one momentum), but the same flow is Hamiltonian a second way: an independent
pair (H2, J2) reproduces it exactly, and every blend c1*H1 + c2*H2 comes with
its own Poisson tensor. Some blends are positive definite: the ghost problem
of the free model is a statement about one chart of a bi-Hamiltonian system,
not about the dynamics.

Run: python demos/01_bihamiltonian_structure.py
"""

import numpy as np

import puosc as p

par = p.make_params(omega1=1.0, omega2=2.0)
print(f"frequencies (1, 2)  ->  alpha = {par.alpha}, beta = {par.beta}")

A = p.flow_matrix(par)
print("\nflow matrix A (companion form):")
print(A)
print("eigenvalues:", np.round(np.linalg.eigvals(A), 12))

print("\nfirst structure:  J1 grad(H1) = A z")
print("residual:", np.max(np.abs(p.j1(par).j @ p.h1(par).coeffs - A)))

print("second structure: J2 grad(H2) = A z")
print("residual:", np.max(np.abs(p.j2(par).j @ p.h2(par).coeffs - A)))

z = p.JetState(1.0, 0.0, -1.0, 0.0)  # pure slow mode, q = cos(t)
print(f"\nat the slow-mode state {z}:")
print(f"  H1 = {p.h1(par).value(z):+.4f}   (negative: the ghost sector)")
print(f"  H2 = {p.h2(par).value(z):+.4f}")

print("\nthe energy in the momentum chart is linear in p1:")
S = p.transport_observable(par, p.h1(par), "ostrogradsky").coeffs
print(f"  p1^2 coefficient = {S[2, 2]}  (no lower bound)")

print("\nblends H' = c1 H1 + c2 H2 and their tensors:")
for c1, c2 in ((1.0, 0.0), (0.0, 1.0), (-1.0, 2.0)):
    H = p.blend_h(par, c1, c2)
    eig = np.linalg.eigvalsh(H.coeffs)
    J = p.blend_j(par, c1, c2)
    res = np.max(np.abs(J.j @ H.coeffs - A))
    tag = "positive definite" if eig[0] > 0 else "indefinite"
    print(f"  (c1, c2) = ({c1:+.0f}, {c2:+.0f}):  eigenvalues "
          f"{np.round(eig, 3)}  ->  {tag};  J' residual {res:.1e}")

print("\nthe blend Hessian degenerates on the rays c2 = -c1 w_i^2:")
for c2 in (-1.0, -4.0):
    try:
        p.blend_j(par, 1.0, c2)
    except p.errors.SingularBlendError as exc:
        print(f"  (1, {c2:+.0f}): {exc}")

print("\ncompatibility (what makes every blend work): "
      "S1 J1 S2 - S2 J1 S1 = 0, residual",
      np.max(np.abs(p.h1(par).coeffs @ p.j1(par).j @ p.h2(par).coeffs
                    - p.h2(par).coeffs @ p.j1(par).j @ p.h1(par).coeffs)))
