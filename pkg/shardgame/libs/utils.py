import os

import numpy as np
import psutil


def project_onto_capped_simplex(point, capacity):
    """Euclidean projection onto {x >= 0, sum(x) <= capacity}."""
    clipped = np.maximum(point, 0.0)
    if clipped.sum() <= capacity:
        return clipped
    # sum constraint is active: project onto {x >= 0, sum(x) = capacity}
    ordered = np.sort(point)[::-1]
    cumulative = np.cumsum(ordered) - capacity
    ranks = np.arange(1, len(point) + 1)
    active = ordered - cumulative / ranks > 0
    rho = ranks[active][-1]
    threshold = cumulative[rho - 1] / rho
    return np.maximum(point - threshold, 0.0)


def central_difference_jacobian(f, x0, steps):
    """Jacobian of a vector function with central differences, one step per coordinate."""
    x0 = np.asarray(x0, dtype=float)
    steps = np.broadcast_to(np.asarray(steps, dtype=float), x0.shape)
    columns = []
    for i, h in enumerate(steps):
        e = np.zeros_like(x0)
        e[i] = h
        columns.append((np.asarray(f(x0 + e)) - np.asarray(f(x0 - e))) / (2 * h))
    return np.column_stack(columns)


def central_difference_hessian(f, x0, steps):
    """Second-order central difference Hessian of a scalar function."""
    x0 = np.asarray(x0, dtype=float)
    steps = np.broadcast_to(np.asarray(steps, dtype=float), x0.shape)
    dim = len(x0)
    f0 = f(x0)
    hess = np.zeros((dim, dim))
    E = np.diag(steps)
    for ii in range(dim):
        for jj in range(ii, dim):
            if ii == jj:
                value = (f(x0 + E[ii]) - 2 * f0 + f(x0 - E[ii])) / steps[ii] ** 2
            else:
                value = (f(x0 + E[ii] + E[jj]) - f(x0 + E[ii] - E[jj])
                         - f(x0 - E[ii] + E[jj]) + f(x0 - E[ii] - E[jj])) / (4 * steps[ii] * steps[jj])
                hess[jj, ii] = value
            hess[ii, jj] = value
    return hess


def default_workers():
    return psutil.cpu_count(logical=False) or 1


def verify_output_dir(output_dir):
    """
    Checks whether the directory, specified by the "output_dir" parameter,
    exists or not. If "output_dir" points to a non-existent directory,
    then a NotADirectoryError exception is thrown, otherwise the absolute path
    of that directory is returned.
    """
    absolute_path_of_output_dir = os.path.abspath(output_dir)

    if os.path.isdir(absolute_path_of_output_dir):
        return absolute_path_of_output_dir
    else:
        raise NotADirectoryError(f'The "{output_dir}" directory, which was specified by the --out '
                                 'command-line argument, is not an existing directory. '
                                 'Please either create that directory or specify a different one.')
