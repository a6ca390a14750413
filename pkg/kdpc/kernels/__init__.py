"""Kernels, their Gram matrices and their analytic gradients."""

from kdpc.kernels._kernel import KERNEL_FAMILIES, Kernel, KernelSpec
from kdpc.kernels.rbf import GaussianRbfKernel, median_bandwidth, rbf_jacobian_row_at_zero


def make_kernel(spec: KernelSpec) -> Kernel:
    """Instantiate the kernel described by a specification."""
    if spec.family == "gaussian_rbf":
        return GaussianRbfKernel(spec)
    raise ValueError(f"no implementation for kernel family `{spec.family}`")


__all__ = [
    "KERNEL_FAMILIES", "Kernel", "KernelSpec", "make_kernel",
    "GaussianRbfKernel", "median_bandwidth", "rbf_jacobian_row_at_zero",
]
