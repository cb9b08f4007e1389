"""Generate the committed 50-pair multilingual metric fixture.

Builds hypothesis/reference sentence pairs across several scripts with a mix
of perfect matches, near matches, heavy edits and one fully disjoint pair,
then writes tests/data/metric_fixture.{hyp,ref}. Deterministic; rerunning
reproduces the committed files byte for byte.
"""
from __future__ import annotations

import random
from pathlib import Path

VOCAB = {
    "latin_id": (
        "ilmuwan dari universitas sekolah kedokteran pada hari senin mengumumkan "
        "penemuan alat diagnostik baru yang bisa mengurutkan sel berdasarkan tipe "
        "cip kecil dapat dicetak diproduksi menggunakan printer standar dengan "
        "biaya sekitar satu sen per media lokal melaporkan sebuah kendaraan "
        "pemadam api bandara terguling saat sedang dioperasikan pilot tersebut "
        "diidentifikasi sebagai pemimpin skuadron"
    ).split(),
    "latin_es": (
        "los cientificos anunciaron el lunes un nuevo dispositivo capaz de "
        "ordenar las celulas por tipo una pequena tarjeta impresa que puede "
        "producirse con impresoras estandar por un centavo cada una los medios "
        "locales informaron que un vehiculo de bomberos volco durante la "
        "operacion del aeropuerto"
    ).split(),
    "cyrillic": (
        "вчені оголосили у понеділок про відкриття нового діагностичного "
        "пристрою який може сортувати клітини за типом невеликий чип можна "
        "надрукувати звичайним принтером за один цент місцеві змі повідомили "
        "що пожежна машина аеропорту перекинулася під час роботи"
    ).split(),
    "devanagari": (
        "वैज्ञानिकों ने सोमवार को एक नए नैदानिक उपकरण की खोज की घोषणा की जो "
        "कोशिकाओं को प्रकार के अनुसार क्रमबद्ध कर सकता है छोटी चिप सामान्य "
        "प्रिंटर से छापी जा सकती है स्थानीय मीडिया ने बताया कि हवाई अड्डे की "
        "दमकल गाड़ी पलट गई"
    ).split(),
    "malayalam": (
        "ശാസ്ത്രജ്ഞർ തിങ്കളാഴ്ച പുതിയ രോഗനിർണയ ഉപകരണം കണ്ടെത്തിയതായി "
        "പ്രഖ്യാപിച്ചു കോശങ്ങളെ തരം അനുസരിച്ച് ക്രമീകരിക്കാൻ കഴിയും ചെറിയ "
        "ചിപ്പ് സാധാരണ പ്രിന്ററിൽ അച്ചടിക്കാം പ്രാദേശിക മാധ്യമങ്ങൾ "
        "റിപ്പോർട്ട് ചെയ്തു"
    ).split(),
    "telugu": (
        "శాస్త్రవేత్తలు సోమవారం కొత్త నిర్ధారణ పరికరాన్ని కనుగొన్నట్లు "
        "ప్రకటించారు కణాలను రకాన్ని బట్టి క్రమబద్ధీకరించగలదు చిన్న చిప్ "
        "సాధారణ ప్రింటర్‌తో ముద్రించవచ్చు స్థానిక మీడియా నివేదించింది"
    ).split(),
}

PUNCT_TAILS = ["", "", "", ".", ",", "!", "?", ":", ";"]


def make_sentence(rng: random.Random, vocab: list[str], n_tokens: int) -> list[str]:
    tokens = []
    for _ in range(n_tokens):
        w = rng.choice(vocab)
        tail = rng.choice(PUNCT_TAILS)
        if rng.random() < 0.06:
            w = w.capitalize()
        if rng.random() < 0.05:
            w = str(rng.randint(0, 2030))
        tokens.append(w + tail)
    return tokens


def perturb(rng: random.Random, tokens: list[str], vocab: list[str], strength: float) -> list[str]:
    out = []
    for tok in tokens:
        roll = rng.random()
        if roll < strength * 0.4:
            continue                                     # deletion
        if roll < strength * 0.8:
            out.append(rng.choice(vocab))                # substitution
            continue
        out.append(tok)
        if rng.random() < strength * 0.2:
            out.append(rng.choice(vocab))                # insertion
    if not out:
        out = [rng.choice(vocab)]
    if rng.random() < strength and len(out) > 3:         # local swap
        i = rng.randrange(len(out) - 1)
        out[i], out[i + 1] = out[i + 1], out[i]
    return out


def main() -> None:
    rng = random.Random(20250810)
    scripts = list(VOCAB)
    refs, hyps = [], []

    for i in range(50):
        vocab = VOCAB[scripts[i % len(scripts)]]
        n = rng.choice([2, 3, 5, 8, 12, 16, 22, 30])
        ref = make_sentence(rng, vocab, n)
        if i in (7, 29):                 # perfect matches
            hyp = list(ref)
        elif i == 13:                    # fully disjoint pair
            other = VOCAB[scripts[(i + 3) % len(scripts)]]
            hyp = make_sentence(rng, other, n)
        else:
            hyp = perturb(rng, ref, vocab, strength=rng.choice([0.1, 0.25, 0.5, 0.8]))
        refs.append(" ".join(ref))
        hyps.append(" ".join(hyp))

    data = Path(__file__).resolve().parent.parent / "tests" / "data"
    (data / "metric_fixture.ref").write_text("\n".join(refs) + "\n", encoding="utf-8")
    (data / "metric_fixture.hyp").write_text("\n".join(hyps) + "\n", encoding="utf-8")
    print(f"wrote 50 pairs under {data}")


if __name__ == "__main__":
    main()
