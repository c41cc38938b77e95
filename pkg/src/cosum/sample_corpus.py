"""Deterministic bundled sample corpus.

A small controlled-vocabulary review corpus: every entity mixes shared
hotel-review boilerplate with its own distinctive phrases, so pairs of
entities have engineered common and entity-specific content. Used by the
demo scripts and the directional decoding tests.
"""

from __future__ import annotations

import json
import random
from typing import List, Tuple

from .data import EntityReviewSet, Review

SHARED_SENTENCES = [
    "the staff were friendly and helpful .",
    "the room was clean and comfortable .",
    "the breakfast was fresh and tasty .",
    "the location is convenient for the city center .",
    "we enjoyed our stay and would return .",
]

ENTITY_SENTENCES = {
    "harbor_hotel": [
        "the rooftop pool overlooks the busy harbor .",
        "ferries depart right outside the harbor entrance .",
        "the seafood restaurant serves fresh oysters nightly .",
    ],
    "garden_inn": [
        "the quiet garden courtyard is full of roses .",
        "bicycles are free to borrow at the garden gate .",
        "the vegetarian menu uses herbs from the garden .",
    ],
    "summit_lodge": [
        "the ski lift starts directly behind the lodge .",
        "a roaring fireplace warms the alpine lounge .",
        "guided mountain hikes leave every sunny morning .",
    ],
    "lakeside_resort": [
        "kayaks and paddle boats wait on the private lake .",
        "the spa offers lakeside massages at sunset .",
        "loons call across the calm water every evening .",
    ],
    "old_town_suites": [
        "cobblestone streets surround the medieval square .",
        "the suites keep original wooden beams and frescoes .",
        "street musicians play below the balcony windows .",
    ],
    "airport_express": [
        "the free shuttle runs to the terminal every ten minutes .",
        "soundproof windows block the runway noise completely .",
        "early checkout and luggage storage are effortless .",
    ],
    "vineyard_estate": [
        "wine tastings happen daily in the ancient cellar .",
        "rows of vines stretch to the horizon from the terrace .",
        "the sommelier pairs local vintages with dinner .",
    ],
    "desert_oasis": [
        "camel rides cross the dunes at dawn .",
        "the shaded oasis pool is ringed by palm trees .",
        "stargazing tours reveal a brilliant desert sky .",
    ],
}

SAMPLE_PAIRS: List[Tuple[str, str]] = [
    ("harbor_hotel", "garden_inn"),
    ("summit_lodge", "lakeside_resort"),
    ("old_town_suites", "airport_express"),
    ("vineyard_estate", "desert_oasis"),
]


def build_sample_corpus(
    reviews_per_entity: int = 6, seed: int = 13
) -> List[EntityReviewSet]:
    """Generate the corpus deterministically from a fixed seed."""
    rng = random.Random(seed)
    corpus = []
    for entity_id in sorted(ENTITY_SENTENCES):
        specific = ENTITY_SENTENCES[entity_id]
        reviews = []
        for i in range(reviews_per_entity):
            shared = rng.sample(SHARED_SENTENCES, 2)
            own = rng.sample(specific, 2)
            sentences = [shared[0], own[0], shared[1], own[1]]
            rng.shuffle(sentences)
            reviews.append(
                Review(
                    entity_id=entity_id,
                    review_id=f"{entity_id}-{i:02d}",
                    text=" ".join(sentences),
                )
            )
        corpus.append(EntityReviewSet(entity_id, reviews))
    return corpus


def write_sample_corpus(path: str, reviews_per_entity: int = 6, seed: int = 13) -> None:
    corpus = build_sample_corpus(reviews_per_entity, seed)
    with open(path, "w", encoding="utf-8") as fh:
        for entity in corpus:
            for r in entity.reviews:
                fh.write(
                    json.dumps(
                        {
                            "entity_id": r.entity_id,
                            "review_id": r.review_id,
                            "text": r.text,
                        },
                        sort_keys=True,
                    )
                )
                fh.write("\n")
