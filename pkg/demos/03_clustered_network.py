"""A zero-loss network for well separated clusters, written down directly.

The data is checked for clustering (tight classes far from the common
barycenter), then one cone layer per class collapses that class onto a
point while leaving the others alone.  A final affine layer maps the
collapsed points to the labels.  No training takes place.
"""

from zeroloss import (
    ClusteredOptions,
    build_clustered,
    certify,
    check_clustered,
    collapsed_schedule,
    count_params,
    gen_clustered,
)

ds = gen_clustered(seed=7, M=8, Q=4, points_per_class=250, spread=0.6)
print(f"{ds.n_points} points in R^{ds.ambient_dim}, {ds.class_count} classes")

report = check_clustered(ds)
print(f"clustered: {report.passes}  (delta {report.delta:.3f}, aperture {report.theta_star:.3f})")

net, trace = build_clustered(ds)
for step in trace.steps:
    print(f"  layer for class {step.collapsed_class}: collapsed so far {step.collapsed}")
verdict = certify(net, ds)
print(f"full-width network {net.widths}: worst label error {verdict.max_entry_residual:.1e}")

narrow, _ = build_clustered(ds, ClusteredOptions(width_schedule=collapsed_schedule(8, 4)))
pc = count_params(narrow)
print(f"narrow network {narrow.widths}: worst label error {certify(narrow, ds).max_entry_residual:.1e}")
print(f"  parameters {pc.total} in all, {pc.total_without_output_bias} without the output bias "
      f"(QM + Q^3 + Q^2 = {4 * 8 + 64 + 16})")
