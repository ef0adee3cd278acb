from xcal.engine.rng import STREAMS, RandomStreams


def test_same_seed_same_draws():
    a, b = RandomStreams(42), RandomStreams(42)
    for name in STREAMS:
        assert a[name].random(5).tolist() == b[name].random(5).tolist()


def test_streams_are_independent_of_each_other():
    plain = RandomStreams(7)["loss"].random(3).tolist()
    streams = RandomStreams(7)
    streams["noise-rf"].normal(size=1000)
    assert streams["loss"].random(3).tolist() == plain


def test_names_and_seeds_separate_streams():
    s = RandomStreams(1)
    assert s["loss"].random() != s["jitter"].random()
    assert RandomStreams(1)["loss"].random() != RandomStreams(2)["loss"].random()


def test_stream_is_cached():
    s = RandomStreams(3)
    assert s["loss"] is s["loss"]
