"""Deletes the first item of the first sensitive itemset from its first supporter."""
import sys

db_path, sens_path, sigma, out_path = sys.argv[1:5]
rows = [set(map(int, line.split())) for line in open(db_path)]
sens = [tuple(map(int, line.split())) for line in open(sens_path) if line.strip()]
with open(out_path, "w") as out:
    if sens:
        for tid, row in enumerate(rows, 1):
            if set(sens[0]) <= row:
                out.write(f"{tid} {sens[0][0]}\n")
                break
