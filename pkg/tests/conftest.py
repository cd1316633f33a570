import pytest

from serifu import synth

CORPUS_TEXT = """\
S\taki\tAki\tw1\tmale\tchild
S\tyui\tYui\tw1\tfemale\tadult
L\taki\tそうだぜナッシー
L\taki\t行くぜナッシー
L\taki\t僕も行くぜ
L\tyui\tそうかしらね
L\tyui\t行くわよかしら
L\tyui\t私はそう思うわ
"""


@pytest.fixture
def small_corpus_text():
    return CORPUS_TEXT


def planted_spec(speakers_per_group=2, lines_min=40, lines_max=60, seed=11,
                 usage_prob=0.8):
    suffixes = {
        "boys": "ナッシー",
        "girls": "カシラワ",
        "men": "デゴザル",
        "women": "ダワヨネ",
        "seniors": "ジャロウテ",
    }
    groups = tuple(synth.GroupSpec(label, speakers_per_group, (suffix,),
                                   usage_prob)
                   for label, suffix in suffixes.items())
    return synth.SynthSpec(groups=groups, lines_min=lines_min,
                           lines_max=lines_max, seed=seed), suffixes
