"""Independent brute-force implementations of the four metrics under the
deterministic rule judge. Written separately from the package on purpose:
these stay naive and are only used to cross-check the real code."""

import re

_TOKEN = re.compile(r"[0-9A-Za-z]+")
_TERMINATORS = re.compile(r"[.!?]+")


def _tokens(text):
    return _TOKEN.findall(text.lower())


def _sentences(text):
    out = []
    for part in _TERMINATORS.split(text):
        part = part.strip()
        if part:
            out.append(part)
    return out


def _claims(text):
    return [s for s in _sentences(text) if len(_tokens(s)) >= 2]


def _coverage(piece, reference):
    tokens = _tokens(piece)
    if not tokens:
        return 0.0
    available = set(_tokens(reference))
    hit = 0
    for t in tokens:
        if t in available:
            hit += 1
    return hit / len(tokens)


def brute_faithfulness(answer, contexts, tau=1.0):
    claims = _claims(answer)
    if len(claims) == 0:
        return None
    reference = "\n".join(contexts)
    supported = 0
    for claim in claims:
        if _coverage(claim, reference) >= tau:
            supported += 1
    return supported / len(claims)


def brute_correctness(answer, ground_truth, tau=1.0):
    answer_claims = _claims(answer)
    gt_claims = _claims(ground_truth)
    tp = 0
    fp = 0
    for claim in answer_claims:
        if _coverage(claim, ground_truth) >= tau:
            tp += 1
        else:
            fp += 1
    fn = 0
    for claim in gt_claims:
        if _coverage(claim, answer) < tau:
            fn += 1
    if tp + fp + fn == 0:
        return None
    return tp / (tp + 0.5 * (fp + fn))


def brute_context_precision(contexts, ground_truth, tau_rel=0.2, denominator="relevant"):
    flags = []
    for ctx in contexts:
        flags.append(_coverage(ground_truth, ctx) >= tau_rel)
    relevant = sum(flags)
    if relevant == 0:
        return 0.0
    total = 0.0
    for k in range(1, len(contexts) + 1):
        if flags[k - 1]:
            precision_at_k = sum(flags[:k]) / k
            total += precision_at_k
    denom = relevant if denominator == "relevant" else len(contexts)
    return total / denom


def brute_context_recall(ground_truth, contexts, tau=1.0):
    sentences = [s for s in _sentences(ground_truth) if _tokens(s)]
    if not sentences:
        raise ValueError("ground truth has no sentences")
    reference = "\n".join(contexts)
    attributed = 0
    for sentence in sentences:
        if _coverage(sentence, reference) >= tau:
            attributed += 1
    return attributed / len(sentences)
