#!/usr/bin/env python3
"""Generate the synthetic corpora shipped under data/.

  rct      RCT-format labeled abstracts for training the genre classifier
  norms    abstract/introduction pairs for fitting facet normalization stats
  long     one long introduction for pipeline timing

Sentences come from per-genre templates over a shared vocabulary. Some
templates are deliberately shared between genres and a small share of labels
is flipped, so the classification task is not separable.
"""
import argparse
import os
import random

TOPICS = [
    "automated writing feedback", "code review", "peer assessment", "reading comprehension",
    "sentence simplification", "neural machine translation", "question answering",
    "citation recommendation", "scientific summarization", "discourse parsing",
    "chronic pain management", "type 2 diabetes", "hypertension control", "sleep quality",
    "medication adherence", "postoperative recovery", "depression screening",
    "physical activity", "online learning", "programming education", "data visualization",
    "crowdsourced annotation", "privacy decisions", "misinformation detection",
    "speech recognition", "image captioning", "fall prevention", "smoking cessation",
    "collaborative writing", "academic writing", "mobile health", "remote monitoring",
]
POPULATIONS = [
    "undergraduate students", "graduate students", "novice programmers", "older adults",
    "adults with chronic pain", "patients with type 2 diabetes", "primary care clinicians",
    "crowd workers", "non-native English writers", "high school teachers", "software developers",
    "hospitalized patients", "first-year researchers", "caregivers", "nurses", "online learners",
]
INTERVENTIONS = [
    "a mobile coaching app", "a retrieval-augmented language model", "weekly feedback sessions",
    "an interactive visualization tool", "a transformer-based classifier",
    "cognitive behavioral therapy", "a rule-based tutoring system", "a structured checklist",
    "personalized text messages", "a graph neural network", "a peer review protocol",
    "a browser extension", "a conversational agent", "guided self-help", "a shared dashboard",
    "an adaptive reading interface", "a low-dose regimen", "a home exercise program",
]
OUTCOMES = [
    "writing quality", "task completion time", "pain scores", "classification accuracy",
    "readmission rates", "user satisfaction", "the F1 score", "blood pressure", "HbA1c levels",
    "learning gains", "perceived workload", "annotation agreement", "adherence",
    "response latency", "self-efficacy", "error rates", "symptom severity", "recall",
]
SETTINGS = [
    "three universities", "two hospitals", "an online platform", "a community clinic",
    "a large software company", "a public dataset", "five primary care practices",
    "a massive open online course", "a regional health network",
]
ANALYSES = [
    "mixed-effects regression", "a two-sided t-test", "thematic analysis",
    "an intention-to-treat analysis", "Cox proportional hazards models", "bootstrap resampling",
    "a Wilcoxon signed-rank test", "linear regression with robust errors",
]
DATA = ["essays", "abstracts", "code reviews", "patient records", "survey responses",
        "interview transcripts", "news articles", "sentence pairs", "annotated documents"]

TEMPLATES = {
    "BACKGROUND": [
        "{T} is a common challenge for {P}.",
        "{T} remains poorly understood despite decades of research.",
        "Prior work has shown that {I} can improve {O}.",
        "Many {P} struggle with {T}.",
        "Recent advances in {T} have created new opportunities for {P}.",
        "However, little is known about how {I} affects {O}.",
        "{O} is an important indicator of progress in {T}.",
        "Existing approaches to {T} rely on manual effort and scale poorly.",
        "The burden of {T} continues to grow worldwide.",
        "Despite its importance, {T} has received limited attention.",
        "{T} affects millions of {P} every year.",
        "Traditional methods for {T} are costly and slow.",
        "Because {T} is complex, {P} often need support.",
        "Several studies have examined {T}, but their findings are mixed.",
    ],
    "OBJECTIVE": [
        "We aimed to evaluate whether {I} improves {O} among {P}.",
        "This study investigates the effect of {I} on {O}.",
        "The goal of this work is to understand how {P} approach {T}.",
        "In this paper, we propose {I} to support {T}.",
        "We sought to determine whether {I} reduces {O} in {P}.",
        "Our objective was to compare {I} with {I2} for {T}.",
        "This paper examines the relationship between {T} and {O}.",
        "To address this gap, we explore {I} for {T}.",
        "We set out to assess the feasibility of {I} for {P}.",
        "The purpose of this study was to measure the impact of {I} on {O}.",
        "Here we ask whether {I} helps {P} with {T}.",
    ],
    "METHODS": [
        "We conducted a randomized controlled trial with {N} {P}.",
        "Participants were randomly assigned to {I} or {I2}.",
        "We recruited {N} {P} from {S}.",
        "{O} was measured at baseline and after {W} weeks.",
        "We collected {N} {D} and annotated them for {O}.",
        "Data were analyzed using {A}.",
        "We trained {I} on {N} {D} and evaluated it on a held-out set.",
        "The primary outcome was {O}.",
        "We interviewed {N} {P} about their experience with {T}.",
        "Each session lasted {M} minutes.",
        "Two annotators labeled every item independently.",
        "Secondary outcomes included {O} and {O2}.",
        "We compared {I} against {I2} using {A}.",
        "The study was carried out at {S} over {W} weeks.",
        "Participants completed a questionnaire on {O} before and after the sessions.",
        "We built {I} and deployed it with {P}.",
    ],
    "RESULTS": [
        "{I} improved {O} by {PCT}% compared with {I2}.",
        "{O} was significantly higher in the intervention group (p < 0.0{PD}).",
        "Participants using {I} reported higher {O}.",
        "We found no significant difference in {O} between groups.",
        "The model achieved {O} of 0.{F} on the test set.",
        "{N} of {N2} participants completed the study.",
        "Mean {O} decreased from {A1} to {B1}.",
        "{P} who received {I} showed greater {O}.",
        "{O} improved in {PCT}% of {P}.",
        "Compared with {I2}, {I} reduced {O} by {PCT}%.",
        "Agreement between annotators was high (kappa = 0.{F}).",
        "The effect persisted after {W} weeks.",
        "Adverse events were rare and mild.",
        "Our analysis revealed three recurring themes related to {T}.",
    ],
    "CONCLUSIONS": [
        "{I} is a promising approach for {T}.",
        "These findings suggest that {I} can improve {O} for {P}.",
        "Our results highlight the need for further work on {T}.",
        "We discuss implications for the design of {I}.",
        "Future work should examine {T} in larger samples.",
        "{I} may be considered as an option for {P}.",
        "Overall, {I} offers a practical way to support {T}.",
        "Larger trials are needed to confirm these results.",
        "This work provides evidence that {T} can be improved with {I}.",
        "In conclusion, {I} was effective and well accepted by {P}.",
    ],
}

# Sentences that plausibly belong to either of two genres.
SHARED = [
    ("{I} can improve {O} for {P}.", ("BACKGROUND", "CONCLUSIONS")),
    ("We found that {I} improves {O}.", ("RESULTS", "CONCLUSIONS")),
    ("We used {I} to study {T}.", ("OBJECTIVE", "METHODS")),
    ("{P} rated {I} as easy to use.", ("RESULTS", "METHODS")),
    ("{T} is closely related to {O}.", ("BACKGROUND", "RESULTS")),
    ("We examine how {I} changes {O}.", ("OBJECTIVE", "METHODS")),
]

GENRES = ["BACKGROUND", "OBJECTIVE", "METHODS", "RESULTS", "CONCLUSIONS"]


def fill(rng: random.Random, template: str, ctx: dict) -> str:
    values = dict(ctx)
    values.update(
        N=rng.randint(12, 480), N2=rng.randint(481, 900), W=rng.choice([2, 4, 6, 8, 12, 24]),
        M=rng.choice([20, 30, 45, 60, 90]), PCT=rng.randint(5, 60), PD=rng.randint(1, 5),
        F=rng.randint(55, 95), A1=round(rng.uniform(5, 9), 1), B1=round(rng.uniform(2, 4.9), 1),
        O2=rng.choice(OUTCOMES), I2=rng.choice(INTERVENTIONS), S=rng.choice(SETTINGS),
        A=rng.choice(ANALYSES), D=rng.choice(DATA),
    )
    s = template.format(**values)
    return s[0].upper() + s[1:]


def abstract_plan(rng: random.Random) -> list:
    plan = []
    plan += ["BACKGROUND"] * rng.choice([0, 1, 1, 2, 2, 3])
    plan += ["OBJECTIVE"] * rng.choice([0, 1, 1, 1, 1, 2])
    plan += ["METHODS"] * rng.randint(2, 5)
    plan += ["RESULTS"] * rng.randint(2, 5)
    plan += ["CONCLUSIONS"] * rng.choice([1, 1, 2])
    return plan


def abstract_sentences(rng: random.Random, noise: float, shared_rate: float = 0.12):
    ctx = dict(T=rng.choice(TOPICS), P=rng.choice(POPULATIONS), I=rng.choice(INTERVENTIONS),
               O=rng.choice(OUTCOMES))
    out = []
    used = set()
    for label in abstract_plan(rng):
        candidates = [t for t, labels in SHARED if label in labels]
        if candidates and rng.random() < shared_rate:
            template = rng.choice(candidates)
        else:
            template = rng.choice(TEMPLATES[label])
        for _ in range(5):
            if template not in used:
                break
            template = rng.choice(TEMPLATES[label])
        used.add(template)
        if rng.random() < noise:
            label = rng.choice([g for g in GENRES if g != label])
        out.append((label, fill(rng, template, ctx)))
    return ctx, out


def write_rct(path: str, rng: random.Random, abstracts: int, noise: float) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for i in range(abstracts):
            _, sentences = abstract_sentences(rng, noise)
            f.write(f"###{100000 + i}\n")
            for label, text in sentences:
                f.write(f"{label}\t{text}\n")
                count += 1
            f.write("\n")
    return count


INTRO_EXTRA = [
    "In this paper, we present {I}, which helps {P} with {T}.",
    "Our approach builds on prior work on {T}, but it focuses on {O}.",
    "To evaluate {I}, we ran a study with {N} {P} at {S}.",
    "The results show that {I} improves {O} compared with {I2}.",
    "We make three contributions.",
    "First, we characterize the difficulties that {P} face with {T}.",
    "Second, we design and implement {I}.",
    "Third, we report a study showing that {I} improves {O}.",
    "For example, {P} often spend hours on {T} without clear guidance.",
    "As a result, {O} varies widely across {P}.",
    "This problem is especially acute when {P} work without expert support.",
    "Such tools, however, rarely explain their suggestions.",
]


def intro_paragraphs(rng: random.Random, ctx: dict, paragraphs: int) -> list:
    paras = []
    for p in range(paragraphs):
        n = rng.randint(3, 6)
        sents = []
        for _ in range(n):
            if p == 0:
                pool = TEMPLATES["BACKGROUND"]
            elif p == paragraphs - 1:
                pool = INTRO_EXTRA + TEMPLATES["OBJECTIVE"]
            else:
                pool = TEMPLATES["BACKGROUND"] + INTRO_EXTRA + TEMPLATES["METHODS"][:4]
            sents.append(fill(rng, rng.choice(pool), ctx))
        paras.append(" ".join(sents))
    return paras


def write_norms(directory: str, rng: random.Random, pairs: int) -> None:
    os.makedirs(directory, exist_ok=True)
    for i in range(pairs):
        ctx, labeled = abstract_sentences(rng, 0.0)
        intro = intro_paragraphs(rng, ctx, rng.randint(2, 4))
        intro_sentences = [s for p in intro for s in p.split(". ") if s]
        abstract = []
        for _, text in labeled:
            # Reuse source phrasing some of the time, as real abstracts do.
            if rng.random() < 0.25:
                reused = rng.choice(intro_sentences).rstrip(".") + "."
                abstract.append(reused)
            else:
                abstract.append(text)
        stem = os.path.join(directory, f"{i:03d}")
        with open(stem + ".txt", "w", encoding="utf-8", newline="\n") as f:
            f.write(" ".join(abstract) + "\n")
        with open(stem + ".source.txt", "w", encoding="utf-8", newline="\n") as f:
            f.write("\n\n".join(intro) + "\n")


def write_long(path: str, rng: random.Random, words: int) -> None:
    ctx = dict(T=rng.choice(TOPICS), P=rng.choice(POPULATIONS), I=rng.choice(INTERVENTIONS),
               O=rng.choice(OUTCOMES))
    paras = []
    total = 0
    while total < words:
        para = intro_paragraphs(rng, ctx, 3)[1]
        paras.append(para)
        total += len(para.split())
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n\n".join(paras) + "\n")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("kind", choices=["rct", "norms", "long"])
    ap.add_argument("--out", required=True)
    ap.add_argument("--seed", type=int, default=20240501)
    ap.add_argument("--abstracts", type=int, default=600)
    ap.add_argument("--noise", type=float, default=0.04)
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--words", type=int, default=1000)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    if args.kind == "rct":
        n = write_rct(args.out, rng, args.abstracts, args.noise)
        print(f"wrote {n} sentences to {args.out}")
    elif args.kind == "norms":
        write_norms(args.out, rng, args.pairs)
    else:
        write_long(args.out, rng, args.words)


if __name__ == "__main__":
    main()
