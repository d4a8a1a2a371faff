"""Regenerates the mock fixture sets from the prompt files.

Chat fixtures are keyed by sha256 of each agent's system prompt, so this must
be rerun whenever a file in prompts/ changes:  python3 fixtures/make_fixtures.py
"""

import hashlib
import json
import shutil
import struct
import zlib
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
PROMPTS = ROOT / "prompts"
FIXTURES = ROOT / "fixtures"


def prompt_key(agent: str) -> str:
    return hashlib.sha256((PROMPTS / f"{agent}.txt").read_bytes()).hexdigest()


def write(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n")


HEART_SPEC = {
    "core_concept": "human heart anatomy",
    "learning_objectives": [
        "Identify the four chambers of the human heart",
        "Trace the path of blood through the heart and its valves",
        "Distinguish the major vessels that carry blood to and from the heart",
    ],
    "required_visual_features": [
        "left atrium", "right atrium", "left ventricle", "right ventricle",
        "aorta", "pulmonary artery", "tricuspid valve", "mitral valve",
    ],
    "complexity_notes": "Middle school level: clean anatomical forms in a front cutaway, no tissue damage or gore.",
    "refined_prompt": (
        "A clean, stylized anatomical model of a human heart in a front cutaway view for a middle school "
        "biology class, showing the left atrium, right atrium, left ventricle and right ventricle, with the "
        "aorta and pulmonary artery leaving the top and the tricuspid valve and mitral valve visible between "
        "the chambers; smooth surfaces, soft red and blue coloring, no blood, neutral background."
    ),
    "labeling_requirements": [
        "Label each of the four chambers",
        "Label the aorta and the pulmonary artery",
        "Label the tricuspid and mitral valves",
    ],
}

CRITERIA = ["age_appropriateness", "factual_accuracy", "no_disturbing_imagery", "no_bias", "educational_value"]

PASS_RATIONALE = {
    "age_appropriateness": "Stylized cutaway suits students aged 11 to 14.",
    "factual_accuracy": "Chambers, valves and great vessels are placed correctly.",
    "no_disturbing_imagery": "No blood, wounds or realistic tissue damage.",
    "no_bias": "The model shows an organ only; no people or groups are depicted.",
    "educational_value": "Every required structure is visible and can be labeled.",
}


def verdict(failing: dict[str, str]) -> dict:
    criteria = []
    for key in CRITERIA:
        if key in failing:
            criteria.append({"key": key, "pass": False, "rationale": failing[key][0], "feedback": failing[key][1]})
        else:
            criteria.append({"key": key, "pass": True, "rationale": PASS_RATIONALE[key], "feedback": ""})
    approved = not failing
    return {
        "criteria": criteria,
        "approved": approved,
        "revision_feedback": "" if approved else " ".join(f for _, f in failing.values()),
    }


BIAS_FAILURE = {
    "no_bias": (
        "The surrounding torso outline shows a single light skin tone, presented as the default human body.",
        "Render the torso outline in a neutral grey instead of a single skin tone",
    )
}

SEARCH_RESULTS = [
    {
        "title": "How the Heart Works: Chambers and Valves",
        "url": "https://learn.example.org/biology/heart-chambers-and-valves",
        "snippet": "The heart has four chambers: two atria on top and two ventricles below. Four valves keep blood "
                   "flowing in one direction.",
        "score": 0.93,
    },
    {
        "title": "Blood Flow Through the Heart (Grades 6-8)",
        "url": "https://learn.example.org/biology/blood-flow-through-the-heart",
        "snippet": "Oxygen-poor blood enters the right atrium, passes the tricuspid valve into the right ventricle, "
                   "and is pumped through the pulmonary artery to the lungs.",
        "score": 0.88,
    },
    {
        "title": "The Aorta and the Great Vessels",
        "url": "https://science.example.edu/anatomy/great-vessels",
        "snippet": "The aorta is the largest artery in the body and carries oxygen-rich blood from the left ventricle.",
        "score": 0.74,
    },
]

TUTOR_PACK = {
    "overview": (
        "This model shows a human heart cut open from the front so you can see its four chambers, the valves "
        "between them and the large vessels that carry blood in and out."
    ),
    "annotations": [
        {"label": "Right atrium", "body": "Receives oxygen-poor blood returning from the body.",
         "anchor": [0.3, 0.72, 0.5]},
        {"label": "Left atrium", "body": "Receives oxygen-rich blood coming back from the lungs.",
         "anchor": [0.7, 0.72, 0.5]},
        {"label": "Right ventricle", "body": "Pumps blood through the pulmonary artery to the lungs.",
         "anchor": [0.35, 0.35, 0.5]},
        {"label": "Left ventricle", "body": "The thickest chamber; pumps blood into the aorta and out to the body.",
         "anchor": [0.65, 0.3, 0.5]},
        {"label": "Aorta", "body": "The largest artery, leaving the top of the heart.", "anchor": [0.55, 0.95, 0.5]},
        {"label": "Valves", "body": "The tricuspid and mitral valves stop blood from flowing backwards.",
         "anchor": "unanchored"},
    ],
    "vocabulary": [
        {"term": "atrium", "definition": "An upper chamber of the heart that receives blood."},
        {"term": "ventricle", "definition": "A lower chamber of the heart that pumps blood out."},
        {"term": "valve", "definition": "A flap of tissue that lets blood flow in only one direction."},
        {"term": "aorta", "definition": "The main artery carrying oxygen-rich blood from the heart to the body."},
    ],
    "quiz": [
        {"stem": "How many chambers does the human heart have?", "choices": ["Two", "Three", "Four", "Six"],
         "correct_index": 2, "explanation": "Two atria and two ventricles make four chambers."},
        {"stem": "Which chamber pumps blood into the aorta?",
         "choices": ["Right atrium", "Left ventricle", "Right ventricle"], "correct_index": 1,
         "explanation": "The left ventricle pushes oxygen-rich blood into the aorta."},
        {"stem": "What do heart valves do?",
         "choices": ["Make blood cells", "Keep blood flowing one way", "Add oxygen to blood"], "correct_index": 1,
         "explanation": "Valves close behind the blood so it cannot flow backwards."},
    ],
    "readings": [
        {"title": r["title"], "url": r["url"], "snippet": r["snippet"]} for r in SEARCH_RESULTS
    ],
}


def png(width: int, height: int) -> bytes:
    """A small solid-red-on-white disc, enough to stand in for a render."""
    rows = []
    for y in range(height):
        row = bytearray([0])
        for x in range(width):
            inside = (x - width / 2) ** 2 + (y - height / 2) ** 2 < (width / 3) ** 2
            row += bytes((180, 30, 40) if inside else (255, 255, 255))
        rows.append(bytes(row))

    def chunk(kind: bytes, data: bytes) -> bytes:
        return struct.pack(">I", len(data)) + kind + data + struct.pack(">I", zlib.crc32(kind + data))

    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", header) + chunk(b"IDAT", zlib.compress(b"".join(rows)))
            + chunk(b"IEND", b""))


def main() -> None:
    mock = FIXTURES / "mock"
    if mock.exists():
        shutil.rmtree(mock / "chat", ignore_errors=True)
    # Reply wrapped in prose and a code fence, as chat models often do.
    write(mock / "chat" / f"{prompt_key('pedagogical')}.json",
          {"reply": "Here is the content specification:\n```json\n" + json.dumps(HEART_SPEC, indent=2) + "\n```"})
    write(mock / "chat" / f"{prompt_key('safeguard')}.json", {"reply_json": verdict({})})
    write(mock / "chat" / f"{prompt_key('tutor')}.json", {"reply_json": TUTOR_PACK})
    write(mock / "generation" / "default.json", {
        "statuses": [{"status": "PENDING"}, {"status": "IN_PROGRESS", "progress": 50},
                     {"status": "SUCCEEDED", "progress": 100}],
        "model": "assets/heart.glb",
        "preview_image": "assets/heart_preview.png",
    })
    search = {"results": SEARCH_RESULTS}
    write(mock / "search" / "human-heart-anatomy-grade-6-8.json", search)
    write(mock / "search" / "human-heart-grade-6-8.json", search)
    (mock / "assets").mkdir(parents=True, exist_ok=True)
    (mock / "assets" / "heart_preview.png").write_bytes(png(64, 64))
    shutil.copyfile(ROOT / "tests" / "data" / "glb" / "good" / "heart.glb", mock / "assets" / "heart.glb")
    write(mock / "fixture.json", {"chat_supports_images": True})

    # Always rejects on bias.
    reject = FIXTURES / "mock-reject"
    shutil.rmtree(reject, ignore_errors=True)
    write(reject / "fixture.json", {"base": "../mock"})
    write(reject / "chat" / f"{prompt_key('safeguard')}.json", {"reply_json": verdict(BIAS_FAILURE)})

    # Rejects the first attempt on bias, approves the second.
    once = FIXTURES / "mock-reject-once"
    shutil.rmtree(once, ignore_errors=True)
    write(once / "fixture.json", {"base": "../mock"})
    write(once / "chat" / f"{prompt_key('safeguard')}.json",
          {"replies": [{"reply_json": verdict(BIAS_FAILURE)}, {"reply_json": verdict({})}]})


if __name__ == "__main__":
    main()
