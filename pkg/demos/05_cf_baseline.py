"""User-kNN collaborative filtering baseline on the bundled ratings.

Run: python3 demos/05_cf_baseline.py
"""

from grannet.cf import evaluate_knn, load_ratings, split_ratings
from grannet.data import bundled_ratings_path

triples = load_ratings(bundled_ratings_path())
train, test = split_ratings(triples, 0.7, seed=0)
print(f"{len(triples)} ratings: {len(train)} train, {len(test)} test")
for k in (1, 2, 5, 10, 20, 34):
    print(f"k={k:<3} MAE {evaluate_knn(train, test, k):.4f}")
