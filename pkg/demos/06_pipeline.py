"""Full run on the bundled dataset: split, train, allocate, granulate, recommend.

Run: python3 demos/06_pipeline.py
"""

from grannet.data import bundled_ratings_path
from grannet.pipeline import PipelineConfig, run_pipeline

report = run_pipeline(PipelineConfig(seed=0, ratings=str(bundled_ratings_path())))
table = report.to_table()
# the per-record section is long; show the first few rows
head, _, records = table.partition("\n  #  target")
print(head)
print("  #  target" + "\n".join(records.splitlines()[:8]))
