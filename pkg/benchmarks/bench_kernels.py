"""Compare the compiled and pure-Python kernel backends.

Run ``python3 benchmarks/bench_kernels.py`` after building the extension
(``python3 setup.py build_ext --inplace`` or an editable install). Prints
best-of-N wall time per kernel and backend plus the max deviation between
the two outputs.
"""

import argparse
import timeit

import numpy as np

from deformqm.kernels import available_backends, get_backend


def cases(n_nodes, n_xi):
    rng = np.random.default_rng(0)
    u = np.sort(rng.uniform(-1.0, 2.0, n_nodes))
    vals = rng.normal(size=n_nodes) + 1j * rng.normal(size=n_nodes)
    xi = np.linspace(-60.0, 60.0, n_xi)
    return {
        "direct_fourier_sum": lambda k: k.direct_fourier_sum(u, vals, xi, -1),
        "fd_weights": lambda k: k.fd_weights(0.1, u[:9], 2),
        "derivative_matrix": lambda k: k.derivative_matrix(u, 8),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nodes", type=int, default=512)
    p.add_argument("--xi", type=int, default=641)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    backends = {name: get_backend(name) for name in available_backends()}
    if "compiled" not in backends:
        print("compiled kernels not built; timing the python backend only")
    print(f"{'kernel':<20} {'backend':<9} {'best [ms]':>10} {'speedup':>8} {'max |diff|':>11}")
    for name, call in cases(args.nodes, args.xi).items():
        times, outputs = {}, {}
        for bname, mod in backends.items():
            number = 1 if name != "fd_weights" else 1000
            t = min(timeit.repeat(lambda: call(mod), number=number, repeat=args.repeat))
            times[bname] = 1e3 * t / number
            outputs[bname] = np.asarray(call(mod))
        ref = times["python"]
        diff = ""
        if len(outputs) == 2:
            diff = f"{np.max(np.abs(outputs['compiled'] - outputs['python'])):.1e}"
        for bname, t in times.items():
            print(f"{name:<20} {bname:<9} {t:>10.3f} {ref / t:>7.1f}x {diff:>11}")


if __name__ == "__main__":
    main()
