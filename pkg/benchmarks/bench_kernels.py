"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is timed on inputs shaped like the ones the network and the
planner use, then one full forward/backward pass of the paper model is timed
with each backend swapped in.
"""
import argparse
import timeit

import numpy as np

from orientbot import _pykernels, kernels, nnet
from orientbot.sim import open_room

try:
    from orientbot import _ckernels
except ImportError:
    _ckernels = None


def kernel_cases(rng):
    x = rng.normal(size=(32, 36, 36, 3))
    x2 = rng.normal(size=(32, 20, 20, 64))
    d = rng.normal(size=(32 * 16 * 16, 5 * 5 * 3))
    act = rng.normal(size=(32, 16, 16, 64))
    room = open_room(boxes=[(2, 2, 3, 5), (5, 1, 6, 3)])
    occ = room.occupied.view(np.uint8)
    return {
        "im2col conv1": lambda k: k.im2col(x, 5, 2, 16, 16),
        "im2col conv2": lambda k: k.im2col(x2, 5, 2, 8, 8),
        "col2im conv1": lambda k: k.col2im(d, 32, 36, 36, 3, 5, 2, 16, 16),
        "lrn window sum": lambda k: k.channel_window_sum(act, 2),
        "bfs 80x80": lambda k: k.bfs_distances(occ, 10, 10),
        "line of sight x64": lambda k: [k.segment_blocked(occ, 5.5, 5.5, 70.5 - i, 60.5) for i in range(64)],
    }


def time_call(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def model_step(backend):
    """One loss+gradient evaluation on a 32-image minibatch with ``backend`` patched in."""
    saved = {name: getattr(kernels, name) for name in ("im2col", "col2im", "channel_window_sum")}
    for name in saved:
        setattr(kernels, name, getattr(backend, name))
    model = nnet.build_paper_model(0)
    rng = np.random.default_rng(0)
    imgs, labels = rng.random((32, 32, 32, 3)), rng.integers(0, 8, 32)
    return lambda: model.loss_and_grads(imgs, labels), saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("cython", _ckernels))
    else:
        print("compiled kernels not built; only the fallback is timed")

    rng = np.random.default_rng(0)
    cases = kernel_cases(rng)
    print(f"{'kernel':<22}" + "".join(f"{name:>14}" for name, _ in backends) + f"{'speed-up':>10}")
    for label, fn in cases.items():
        times = [time_call(lambda: fn(mod), args.repeat) for _, mod in backends]
        ratio = f"{times[0] / times[-1]:9.1f}x" if len(times) > 1 else ""
        print(f"{label:<22}" + "".join(f"{t * 1e3:12.3f}ms" for t in times) + ratio)

    times = []
    for _, mod in backends:
        fn, saved = model_step(mod)
        try:
            times.append(time_call(fn, max(1, args.repeat // 2)))
        finally:
            for name, f in saved.items():
                setattr(kernels, name, f)
    ratio = f"{times[0] / times[-1]:9.1f}x" if len(times) > 1 else ""
    print(f"{'model fwd+bwd (32)':<22}" + "".join(f"{t * 1e3:12.3f}ms" for t in times) + ratio)


if __name__ == "__main__":
    main()
