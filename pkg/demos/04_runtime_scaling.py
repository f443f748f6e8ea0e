"""How one Lloyd iteration scales with the array size n (Mt = n^2)."""
from grasscode.bench import run_bench

res = run_bench(ns=(3, 4, 5, 6), N=2000, K=16, repeats=5)
print(" n  method   median ms  normalised")
for row in res.rows:
    print(f"{row.n:2d}  {row.method:7s}  {1e3 * row.median_s:9.2f}  {row.normalized:10.2f}")
print(f"log-log slope: product {res.exponent_product:.2f}, vq {res.exponent_vq:.2f}")
