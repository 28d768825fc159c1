"""Independent numeric oracles shared across the test suite."""
import numpy as np


def central_difference_gradient(func, x, h=1e-6):
    """Gradient of a scalar function by central differences, coordinate by coordinate."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = h
        grad[j] = (func(x + step) - func(x - step)) / (2.0 * h)
    return grad


def brute_force_component_variance(problem, x):
    """Population variance straight from the definition, separate code path."""
    x = np.asarray(x, dtype=float)
    grads = [problem.component_gradient(i, x) for i in range(problem.n_components)]
    mean = sum(grads) / problem.n_components
    total = 0.0
    for g in grads:
        dev = g - mean
        total += float(np.dot(dev, dev))
    return total / problem.n_components
