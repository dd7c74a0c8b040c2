"""Synthetic hotel review fixture with planted positive and negative themes."""

from __future__ import annotations

from .corpus import Polarity, SyntheticSpec, Theme

P, N = Polarity.POSITIVE, Polarity.NEGATIVE

POSITIVE_THEMES = {
    "location": "location station museum walk central underground park shops river theatre",
    "room": "room bed view bathroom shower pillow balcony wardrobe carpet suite",
    "staff": "staff friendly helpful reception concierge doorman polite welcoming team smile",
}

NEGATIVE_THEMES = {
    "service": "breakfast bar price waiter menu order bill expensive slow coffee",
    "unkind_staff": "rude manager told check desk attitude ignored complaint receptionist unhelpful",
    "cleaning": "dirty stain dust floor hair towel toilet mould sheets smell",
    "facility": "spa pool gym sauna lift closed booking broken wifi facilities",
    "stay": "night sleep noise loud traffic party music wall thin awake",
}

# scores outside the selection rules; these reviews must never reach either corpus
DISTRACTORS = {
    "ten_points": ("perfect everything stunning lovely", (10, 10)),
    "mixed": ("okay average decent mixed", (4, 6)),
}

FILLER = ("the", "was", "and", "very", "hotel", "we", "it", "is", "our")

NATIONALITIES = (
    "United Kingdom", "United Kingdom", "United Kingdom", "United Kingdom",
    "United States of America", "Australia", "Ireland", "United Arab Emirates",
)


def hotel_spec(n_reviews: int = 1200) -> SyntheticSpec:
    themes = [Theme(name, P, tuple(words.split()), (7, 9), 2.0) for name, words in POSITIVE_THEMES.items()]
    themes += [Theme(name, N, tuple(words.split()), (1, 3), 1.0) for name, words in NEGATIVE_THEMES.items()]
    themes += [Theme(name, P, tuple(words.split()), scores, 1.0) for name, (words, scores) in DISTRACTORS.items()]
    return SyntheticSpec(
        tuple(themes),
        n_reviews=n_reviews,
        min_words=6,
        max_words=12,
        filler=FILLER,
        filler_rate=0.3,
        nationalities=NATIONALITIES,
    )


def planted_stems() -> dict[str, frozenset[str]]:
    """Stemmed term pool of each positive and negative theme."""
    from .preprocess import normalize_terms

    pools = {**POSITIVE_THEMES, **NEGATIVE_THEMES}
    return {name: normalize_terms(words.split()) for name, words in pools.items()}


# disjoint pools for planted-count fixtures; no overlap with stopwords or adjectives
PLANTED_POOLS = (
    "location station museum walk central underground park shops river theatre",
    "room bed view bathroom shower pillow balcony wardrobe carpet suite",
    "staff reception concierge doorman manager waiter porter receptionist housekeeper butler",
    "breakfast coffee croissant eggs juice buffet pastry toast bacon omelette",
    "pool spa sauna gym massage jacuzzi steam locker towel treatment",
    "noise traffic music party siren construction neighbours elevator alarm shouting",
)


def planted_spec(n_themes: int, n_reviews: int = 300, polarity: Polarity | str = P) -> SyntheticSpec:
    """Corpus with ``n_themes`` equally likely single-polarity themes."""
    if not 1 <= n_themes <= len(PLANTED_POOLS):
        raise ValueError(f"n_themes must be in 1..{len(PLANTED_POOLS)}")
    polarity = Polarity(polarity)
    scores = (7, 9) if polarity is P else (1, 3)
    themes = tuple(Theme(f"t{i}", polarity, tuple(PLANTED_POOLS[i].split()), scores) for i in range(n_themes))
    return SyntheticSpec(themes, n_reviews=n_reviews, min_words=6, max_words=12,
                         filler=("the", "was", "and", "very", "hotel"), filler_rate=0.3)
