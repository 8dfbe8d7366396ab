"""Complex-eigenvalue density of random matrices with prescribed singular values."""
