"""Write semantic-looking demo embeddings for the bundled demo corpus.

Every skill and domain belongs to a topic family. An item vector is
0.8 * family centroid + 0.6 * item noise; a profile vector is
2 * domain vector + mean(skill vectors). Output: one JSON object per line,
{"id": ..., "vector": [...]}, values rounded to 6 decimals.

Usage: python3 scripts/make_demo_embeddings.py PROFILES_CSV OUT_JSONL
"""

import csv
import json
import random
import sys

DIM = 64
SEED = 42

FAMILIES = {
    "security": ["Cybersecurity", "Blockchain", "Solidity", "Wireshark", "Networking", "Linux", "C"],
    "ai": [
        "ai ml", "Computer Vision", "Natural Language Processing", "Robotics", "TensorFlow", "PyTorch",
        "Scikit-learn", "Quantum Computing",
    ],
    "data": [
        "Data Mining", "Data Science", "Bioinformatics", "Marketing", "Python", "R", "MATLAB", "SQL", "MongoDB",
        "Pandas", "NumPy", "Tableau", "Power BI", "Excel", "Statistics",
    ],
    "web": ["Web Development", "HTML", "CSS", "JavaScript", "TypeScript", "ReactJS", "Node.js"],
    "mobile": ["App Development", "Flutter", "FlutterFlow", "Kotlin", "Swift", "Java"],
    "cloud": ["Cloud Computing", "AWS", "Azure", "Docker", "Kubernetes", "Git", "Go", "Rust"],
    "embedded": ["Internet of Things", "Embedded Systems", "Arduino", "Raspberry Pi", "Verilog", "AutoCAD", "C++"],
    "design": [
        "UI UX Design", "Game design", "Figma", "Canva", "Adobe XD", "Photoshop", "Unity", "Blender",
    ],
}


def gauss_vector(rng):
    return [rng.gauss(0.0, 1.0) for _ in range(DIM)]


def item_vectors():
    rng = random.Random(SEED)
    vectors = {}
    for family in sorted(FAMILIES):
        centroid = gauss_vector(rng)
        for item in sorted(FAMILIES[family]):
            noise = gauss_vector(rng)
            vectors[item.lower()] = [0.8 * c + 0.6 * n for c, n in zip(centroid, noise)]
    return vectors


def main(profiles_csv, out_jsonl):
    items = item_vectors()
    with open(profiles_csv, newline="") as f, open(out_jsonl, "w") as out:
        for row in csv.DictReader(f):
            skills = [s.strip().lower() for s in row["skillset"].split(",") if s.strip()]
            missing = [s for s in skills + [row["domain"].lower()] if s not in items]
            if missing:
                sys.exit(f"{row['id']}: no family for {missing}")
            domain = items[row["domain"].lower()]
            mean = [sum(items[s][d] for s in skills) / len(skills) for d in range(DIM)]
            vector = [round(2.0 * a + b, 6) for a, b in zip(domain, mean)]
            out.write(json.dumps({"id": row["id"], "vector": vector}) + "\n")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(sys.argv[1], sys.argv[2])
