#!/usr/bin/env python3
"""Writes crates/core/fixtures/mini-bilingual: two short En/De "films"."""
import random
import sys
from pathlib import Path

LINES = [
    ("Who is it, {n}?", "Wer ist denn da, {n}?"),
    ("Where are you going, {n}?", "Wohin gehst du, {n}?"),
    ("I have no idea.", "Ich habe keine Ahnung."),
    ("Close the door.", "Mach die Tür zu."),
    ("It's getting late.", "Es wird spät."),
    ("We should leave before dawn.", "Wir sollten vor Sonnenaufgang gehen."),
    ("Did you hear that?", "Hast du das gehört?"),
    ("Yes.", "Ja."),
    ("No.", "Nein."),
    ("{n} is waiting outside.", "{n} wartet draußen."),
    ("Tell {n} to come in.", "{n} soll hereinkommen."),
    ("The {o} is broken again.", "Der {od} ist schon wieder kaputt."),
    ("Give me the {o}.", "Gib mir den {od}."),
    ("Don't touch the {o}!", "Fass den {od} nicht an!"),
    ("I found it near the river.", "Ich habe es am Fluss gefunden."),
    ("How much do you want for it?", "Wie viel willst du dafür?"),
    ("Three hundred marks.", "Dreihundert Mark."),
    ("That's far too much.", "Das ist viel zu viel."),
    ("Then go somewhere else.", "Dann geh doch woanders hin."),
    ("Where is the station?", "Wo ist der Bahnhof?"),
    ("The last train leaves at midnight.", "Der letzte Zug fährt um Mitternacht."),
    ("I'm cold.", "Mir ist kalt."),
    ("Sit by the fire.", "Setz dich ans Feuer."),
    ("Have you eaten anything today?", "Hast du heute schon etwas gegessen?"),
    ("Only some bread.", "Nur etwas Brot."),
    ("Thank you, {n}.", "Danke, {n}."),
    ("You're welcome.", "Gern geschehen."),
    ("Listen to me carefully.", "Hör mir gut zu."),
    ("Nobody must know about this.", "Niemand darf davon erfahren."),
    ("Not even {n}?", "Nicht einmal {n}?"),
    ("Especially not {n}.", "Vor allem nicht {n}."),
    ("What time is it?", "Wie spät ist es?"),
    ("Almost eight o'clock.", "Fast acht Uhr."),
    ("The storm is coming.", "Der Sturm kommt."),
    ("Light the lamp.", "Zünde die Lampe an."),
    ("Someone is knocking.", "Jemand klopft."),
    ("Open it slowly.", "Mach langsam auf."),
    ("It's only the wind.", "Es ist nur der Wind."),
    ("Good night, {n}.", "Gute Nacht, {n}."),
    ("See you tomorrow.", "Bis morgen."),
]
FILMS = [
    (["Martin", "Anna", "Professor"], [("lamp", "Leuchter"), ("boat", "Kahn")]),
    (["Klara", "Otto", "Doctor"], [("radio", "Empfänger"), ("car", "Wagen")]),
]
FILM_LINES = 150


def main(out: Path) -> None:
    rng = random.Random(7)
    src, tgt, starts = [], [], []
    for names, objects in FILMS:
        starts.append(len(src))
        for _ in range(FILM_LINES):
            en, de = rng.choice(LINES)
            n = rng.choice(names)
            o, od = rng.choice(objects)
            src.append(en.format(n=n, o=o))
            tgt.append(de.format(n=n, od=od))
    out.mkdir(parents=True, exist_ok=True)
    (out / "src.txt").write_text("\n".join(src) + "\n", encoding="utf-8")
    (out / "tgt.txt").write_text("\n".join(tgt) + "\n", encoding="utf-8")
    (out / "boundaries.txt").write_text("".join(f"{s}\n" for s in starts), encoding="utf-8")


if __name__ == "__main__":
    root = Path(__file__).resolve().parent.parent
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else root / "crates/core/fixtures/mini-bilingual")
