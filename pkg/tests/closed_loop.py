"""Continuous-time PI-RFF closed loop on the nominal 3-DOF plant M nu_dot + D nu = tau.

The control law is evaluated at every RK4 stage with the integral state carried
as part of the ODE state, which is the system the Lyapunov argument is about.
"""
import numpy as np

from dpsim.gnc import VelGains, lyapunov, velocity_control


def simulate_velocity_loop(M, D, gains: VelGains, nu_d, nu0, dt=0.01, t_end=20.0):
    M_inv = np.linalg.inv(M)
    zero = np.zeros(3)

    def f(z):
        nu, xi = z[:3], z[3:]
        tau, _ = velocity_control(nu, nu_d, zero, gains, M, D, dt, xi=xi)
        return np.concatenate([M_inv @ (tau - D @ nu), nu - nu_d])

    z = np.concatenate([nu0, gains.xi])
    V = [lyapunov(z[:3] - nu_d, z[3:], M, gains.ki)]
    for _ in range(int(round(t_end / dt))):
        k1 = f(z)
        k2 = f(z + 0.5 * dt * k1)
        k3 = f(z + 0.5 * dt * k2)
        k4 = f(z + dt * k3)
        z = z + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        V.append(lyapunov(z[:3] - nu_d, z[3:], M, gains.ki))
    return np.array(V), z


def random_velocity_case(rng):
    M = np.diag(rng.uniform(5.0, 60.0, 3))
    D = np.diag(rng.uniform(0.5, 15.0, 3))
    gains = VelGains(rng.uniform(0.2, 3.0, 3), rng.uniform(0.05, 1.0, 3))
    nu_d = rng.uniform(-0.3, 0.3, 3)
    nu0 = rng.uniform(-0.3, 0.3, 3)
    return M, D, gains, nu_d, nu0
