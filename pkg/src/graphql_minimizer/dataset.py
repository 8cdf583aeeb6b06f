"""
Deterministic generation of period-tracking test data

Every user has one profile (1:1) and one or more menstrual cycles (1:n); each
cycle records two to six symptoms, and a symptom logged around the change of
cycles may belong to both (n:m).  Relations are linked in both directions.
"""

from datetime import datetime, timedelta, timezone
import logging
import random
from .datasource import MemoryDataSource

log = logging.getLogger(__name__)

FIRST_NAMES = [
    "Amelie",
    "Berit",
    "Carla",
    "Dana",
    "Elif",
    "Fatima",
    "Greta",
    "Hanna",
    "Ines",
    "Johanna",
    "Katrin",
    "Lea",
    "Maja",
    "Nora",
    "Olivia",
    "Paula",
]

LAST_NAMES = [
    "Becker",
    "Fischer",
    "Hoffmann",
    "Koch",
    "Meyer",
    "Müller",
    "Richter",
    "Schmidt",
    "Schneider",
    "Wagner",
    "Weber",
    "Wolf",
]

COUNTRIES = ["AT", "CH", "DE", "DK", "FR", "IT", "NL", "PL", "SE"]

MOODS = ["anxious", "calm", "content", "energetic", "irritable", "sad", "tired"]

#: Date ages are computed relative to
REFERENCE_DATE = datetime(2023, 1, 1, tzinfo=timezone.utc)

#: Probability that a symptom is also linked to the owning user's previous
#: cycle
SHARED_SYMPTOM_RATE = 0.2


def generate_dataset(n_users: int, seed: int) -> MemoryDataSource:
    """
    Generate ``n_users`` users with their profiles, cycles, and symptoms.
    The same arguments always produce the same records in the same order.
    """
    if not isinstance(n_users, int) or n_users < 1:
        raise ValueError(f"n_users must be a positive integer, got {n_users!r}")
    rng = random.Random(seed)
    source = MemoryDataSource()
    n_cycles = n_symptoms = 0
    for i in range(1, n_users + 1):
        first = rng.choice(FIRST_NAMES)
        last = rng.choice(LAST_NAMES)
        birth_date = datetime(
            rng.randint(1960, 2004),
            rng.randint(1, 12),
            rng.randint(1, 28),
            tzinfo=timezone.utc,
        )
        user_id = f"user-{i}"
        profile_id = f"profile-{i}"
        source.add_record(
            "User",
            {
                "id": user_id,
                "name": f"{first} {last}",
                "email": f"{first.lower()}.{last.lower()}{i}@example.org",
                "birthDate": birth_date,
            },
        )
        source.add_record(
            "Profile",
            {
                "id": profile_id,
                "age": _age(birth_date),
                "heightCm": rng.randint(150, 190),
                "country": rng.choice(COUNTRIES),
            },
        )
        source.add_link("User", "profile", "Profile", user_id, profile_id)
        source.add_link("Profile", "user", "User", profile_id, user_id)
        start = REFERENCE_DATE + timedelta(days=rng.randint(0, 60))
        previous_cycle = None
        for _ in range(rng.randint(1, 4)):
            n_cycles += 1
            cycle_id = f"cycle-{n_cycles}"
            length = rng.randint(21, 35)
            source.add_record(
                "Cycle", {"id": cycle_id, "startDate": start, "lengthDays": length}
            )
            source.add_link("User", "cycles", "Cycle", user_id, cycle_id)
            source.add_link("Cycle", "user", "User", cycle_id, user_id)
            for _ in range(rng.randint(2, 6)):
                n_symptoms += 1
                symptom_id = f"symptom-{n_symptoms}"
                recorded = start + timedelta(
                    days=rng.randrange(length), seconds=rng.randrange(86400)
                )
                source.add_record(
                    "Symptom",
                    {
                        "id": symptom_id,
                        "pain": round(rng.uniform(0, 10), 1),
                        "mood": rng.choice(MOODS),
                        "recordedAt": recorded,
                    },
                )
                cycles = [cycle_id]
                if previous_cycle is not None and rng.random() < SHARED_SYMPTOM_RATE:
                    cycles.append(previous_cycle)
                for cid in cycles:
                    source.add_link("Cycle", "symptoms", "Symptom", cid, symptom_id)
                    source.add_link("Symptom", "cycles", "Cycle", symptom_id, cid)
            previous_cycle = cycle_id
            start += timedelta(days=length)
    log.debug(
        "Generated %d users, %d cycles, %d symptoms with seed %d",
        n_users,
        n_cycles,
        n_symptoms,
        seed,
    )
    return source


def users_for_symptoms(n_symptoms: int) -> int:
    """
    Return a user count for which `generate_dataset()` is certain to produce
    at least ``n_symptoms`` symptoms
    """
    # Every user has at least one cycle with at least two symptoms
    return max(1, -(-n_symptoms // 2))


def _age(birth_date):
    years = REFERENCE_DATE.year - birth_date.year
    if (REFERENCE_DATE.month, REFERENCE_DATE.day) < (birth_date.month, birth_date.day):
        years -= 1
    return years
