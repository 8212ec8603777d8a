#!/usr/bin/env python3
"""Regenerates the synthetic sample study under data/.

The cases are invented stand-ins with the same fields as the original study
materials; they are not the published cases.
"""

import json
import pathlib
import random

HERE = pathlib.Path(__file__).resolve().parent
DATA = HERE.parent / "data"

NAMES = ["Alex", "Sam", "Jordan", "Taylor", "Morgan", "Casey", "Riley", "Jamie",
         "Avery", "Quinn", "Robin", "Drew", "Kim", "Charlie", "Frankie", "Sky"]
CHEMICALS = ["Toluene", "Xylene", "Acetone", "Benzene", "Styrene", "Phenol",
             "Hexane", "Methanol", "Ethanol", "Ammonia", "Chlorine", "Formaldehyde",
             "Acrolein", "Cresol", "Pyridine", "Nitrobenzene"]


def high_case(rng, i):
    weight = rng.randrange(55, 105)
    units = rng.randrange(1, 11)
    hours = rng.randrange(1, 6)
    gender = rng.choice(["Male", "Female"])
    stomach = rng.choice(["Empty", "Full"])
    r = 0.68 if gender == "Male" else 0.55
    bac = units * 8 / (weight * 10 * r) - 0.015 * hours - (0.01 if stomach == "Full" else 0)
    over = bac > 0.05
    features = {
        "name": NAMES[i % len(NAMES)],
        "weight": f"{weight} kg",
        "units_of_alcohol": str(units),
        "duration": f"{hours} hours",
        "gender": gender,
        "stomach_content": stomach,
    }
    truth = "over_the_limit" if over else "under_the_limit"
    return features, truth, units, hours


def low_case(rng, i):
    oel = rng.choice([5, 10, 20, 50, 100, 200])
    ph = round(rng.uniform(1.5, 12.5), 1)
    hours = rng.randrange(1, 9)
    air = rng.randrange(1, 6)
    pnec = round(rng.uniform(0.01, 2.0), 2)
    risk = (air >= 4) + (ph < 3 or ph > 11) + (oel <= 10) + (hours >= 6) + (pnec < 0.1)
    unsafe = risk >= 2
    features = {
        "chemical_name": CHEMICALS[i % len(CHEMICALS)],
        "occupational_exposure_limit": f"{oel} ppm",
        "ph": str(ph),
        "exposure_duration": f"{hours} hours",
        "air_pollution_rating": f"{air}/5",
        "pnec_rating": f"{pnec} mg/L",
    }
    truth = "not_safe" if unsafe else "safe"
    return features, truth, air, hours


def flip(label):
    return {"over_the_limit": "under_the_limit", "under_the_limit": "over_the_limit",
            "safe": "not_safe", "not_safe": "safe"}[label]


def explanation(domain, kind, label, a, b):
    if domain == "high":
        if kind == "causal":
            verdict = "over" if label == "over_the_limit" else "under"
            return (f"The person is {verdict} the limit mainly because of the {a} units "
                    f"of alcohol consumed over {b} hours.")
        other = max(1, a - 3) if label == "over_the_limit" else a + 4
        target = "under" if label == "over_the_limit" else "over"
        return f"If the person had consumed {other} units instead of {a}, they would be {target} the limit."
    if kind == "causal":
        verdict = "not safe" if label == "not_safe" else "safe"
        return (f"The chemical is {verdict} mainly because of its air pollution rating "
                f"of {a}/5 and {b} hours of exposure.")
    other = 1 if label == "not_safe" else 5
    target = "safe" if label == "not_safe" else "not safe"
    return f"If the air pollution rating were {other}/5 instead of {a}/5, the chemical would be {target}."


def build_cases(rng):
    conditions = []
    for domain in ("high", "low"):
        make = high_case if domain == "high" else low_case
        for kind in ("causal", "counterfactual"):
            prefix = f"{domain[0]}{'c' if kind == 'causal' else 'f'}"
            task1, task2 = [], []
            for i in range(16):
                features, truth, a, b = make(rng, i)
                shown = flip(truth) if i % 5 == 4 else truth
                task1.append({
                    "id": f"{prefix}-t1-{i + 1:02d}",
                    "features": features,
                    "ai_prediction": shown,
                    "truth_label": truth,
                    "explanation": explanation(domain, kind, shown, a, b),
                })
            for i in range(16):
                features, truth, _, _ = make(rng, i + 16)
                task2.append({
                    "id": f"{prefix}-t2-{i + 1:02d}",
                    "features": features,
                    "truth_label": truth,
                    "ai_prediction": flip(truth) if i % 6 == 5 else truth,
                })
            conditions.append({"familiarity": domain, "explanation_type": kind,
                               "task1": task1, "task2": task2})
    return {"n_llm_users": 40, "runs_per_user": 1, "seed": 20240601, "conditions": conditions}


def build_reference():
    keys = ["high_causal", "high_counterfactual", "low_causal", "low_counterfactual"]
    means = {
        "helpfulness": dict(zip(keys, [3.9, 4.2, 3.1, 3.5])),
        "accuracy": dict(zip(keys, [0.78, 0.80, 0.61, 0.63])),
        "confidence": dict(zip(keys, [3.8, 4.1, 3.4, 3.3])),
    }
    sig = lambda d: {"significant": True, "direction": d}
    ns = {"significant": False, "direction": "none"}
    effects = {
        "helpfulness": {"familiarity": sig("+"), "explanation": sig("+"), "interaction": ns},
        "accuracy": {"familiarity": sig("+"), "explanation": ns, "interaction": ns},
        "confidence": {"familiarity": sig("+"), "explanation": ns, "interaction": sig("+")},
    }
    return {"note": "illustrative values, not the published study results",
            "means": means, "effects": effects}


def main():
    rng = random.Random(7)
    DATA.mkdir(exist_ok=True)
    (DATA / "cases.json").write_text(json.dumps(build_cases(rng), indent=2) + "\n")
    (DATA / "reference.json").write_text(json.dumps(build_reference(), indent=2) + "\n")
    study = {
        "cases": "cases.json",
        "human_reference": "reference.json",
        "models": [{"id": "sample-model", "base_url": "http://127.0.0.1:8000",
                    "temperature": 0.7, "max_tokens": 32}],
        "memory_mode": "memory",
        "aggregate": "on",
        "runs_per_user": 1,
        "output_dir": "../out",
        "accuracy_oracle": "truth_label",
        "mse_granularity": "per_condition",
    }
    (DATA / "study.json").write_text(json.dumps(study, indent=2) + "\n")


if __name__ == "__main__":
    main()
