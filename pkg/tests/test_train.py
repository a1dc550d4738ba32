import numpy as np
import pytest
import torch

from shapes2toon.gan import load_checkpoint
from shapes2toon.raster import RasterImage
from shapes2toon.train import (
    LossLog,
    TrainConfig,
    TrainingDiverged,
    build_models,
    letterbox,
    pair_tensors,
    train,
    translate,
)


class TestLossLog:
    def test_rejects_non_finite(self):
        log = LossLog()
        with pytest.raises(TrainingDiverged):
            log.append(1, float("nan"), 0.0, 0.0)
        with pytest.raises(TrainingDiverged):
            log.append(1, 0.0, float("inf"), 0.0)

    def test_steps_monotone(self):
        log = LossLog()
        log.append(1, 0.1, 0.2, 0.3)
        with pytest.raises(ValueError):
            log.append(1, 0.1, 0.2, 0.3)

    def test_csv_round_trip(self, tmp_path):
        log = LossLog()
        log.append(1, 0.125, 1.375, 0.5)
        log.append(2, 0.0625, 1.25, 0.25)
        p = tmp_path / "l.csv"
        log.to_csv(p)
        assert p.read_text().splitlines()[0] == "step,loss_g_adv,loss_d,loss_l1"
        back = LossLog.from_csv(p)
        assert back.records == log.records


class TestTrainConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(lr=0.0)
        with pytest.raises(ValueError):
            TrainConfig(epochs=0)
        with pytest.raises(ValueError):
            TrainConfig(batch_size=0)


class TestTrainLoop:
    def test_single_step_logs_one_finite_record(self, tiny_corpus, tmp_path):
        cfg = TrainConfig(epochs=1, seed=2, image_size=64, ng=4, nd=4, num_threads=1)
        res = train(tiny_corpus, cfg, tmp_path / "run", train_ids=[tiny_corpus.ids[0]])
        assert len(res.loss_log.records) == 1
        r = res.loss_log.records[0]
        assert all(np.isfinite([r.loss_g_adv, r.loss_d, r.loss_l1]))
        assert (tmp_path / "run" / "losses.csv").exists()
        assert (tmp_path / "run" / "ckpt" / "manifest.json").exists()

    def test_same_seed_identical_loss_logs(self, tiny_corpus, tmp_path):
        cfg = TrainConfig(epochs=2, seed=9, image_size=64, ng=4, nd=4, num_threads=1)
        a = train(tiny_corpus, cfg, tmp_path / "a")
        b = train(tiny_corpus, cfg, tmp_path / "b")
        assert a.loss_log.records == b.loss_log.records

    def test_nan_aborts_and_keeps_last_checkpoint(self, tiny_corpus, tmp_path, monkeypatch):
        import shapes2toon.train as train_mod

        calls = {"n": 0}
        real = train_mod.gan_loss

        def poisoned(d_real, d_fake):
            calls["n"] += 1
            if calls["n"] >= 5:
                bad = (d_real.sum() + d_fake.sum()) * float("nan")
                return bad, bad
            return real(d_real, d_fake)

        monkeypatch.setattr(train_mod, "gan_loss", poisoned)
        cfg = TrainConfig(
            epochs=10, seed=1, image_size=64, ng=4, nd=4, checkpoint_every=1, num_threads=1
        )
        with pytest.raises(TrainingDiverged) as exc:
            train(tiny_corpus, cfg, tmp_path / "run")
        assert exc.value.checkpoint_dir is not None
        gen, _, manifest = load_checkpoint(exc.value.checkpoint_dir)
        assert manifest["step"] >= 1
        log = LossLog.from_csv(tmp_path / "run" / "losses.csv")
        assert all(np.isfinite(r.loss_d) for r in log.records)

    def test_one_adam_step_descends_each_loss(self, tiny_corpus):
        from shapes2toon.gan import gan_loss, l1_loss

        torch.manual_seed(0)
        cfg = TrainConfig(lr=1e-5, seed=4, image_size=64, ng=4, nd=4, num_threads=1)
        gen, disc = build_models(cfg)
        gen.set_noise(False)
        src, tgt = pair_tensors(tiny_corpus, tiny_corpus.ids[0], 64)
        src, tgt = src.unsqueeze(0), tgt.unsqueeze(0)

        opt_d = torch.optim.Adam(disc.parameters(), lr=cfg.lr, betas=(cfg.beta1, cfg.beta2))
        fake = gen(src).detach()
        loss_d_before = gan_loss(disc(src, tgt), disc(src, fake))[0]
        opt_d.zero_grad()
        loss_d_before.backward()
        opt_d.step()
        with torch.no_grad():
            loss_d_after = gan_loss(disc(src, tgt), disc(src, fake))[0]
        assert float(loss_d_after) < float(loss_d_before.detach())

        opt_g = torch.optim.Adam(gen.parameters(), lr=cfg.lr, betas=(cfg.beta1, cfg.beta2))
        out = gen(src)
        loss_g_before = gan_loss(disc(src, tgt).detach(), disc(src, out))[1] + 100.0 * l1_loss(out, tgt)
        opt_g.zero_grad()
        loss_g_before.backward()
        opt_g.step()
        with torch.no_grad():
            out2 = gen(src)
            loss_g_after = gan_loss(disc(src, tgt), disc(src, out2))[1] + 100.0 * l1_loss(out2, tgt)
        assert float(loss_g_after) < float(loss_g_before.detach())


class TestTranslate:
    def test_output_contract(self, desk_checkpoint, tiny_corpus):
        pair = tiny_corpus.load_pair(tiny_corpus.ids[0])
        out = translate(desk_checkpoint.checkpoint_dir, pair.source, dropout_seed=3)
        assert (out.width, out.height, out.channels) == (64, 64, 3)
        assert float(out.pixels.min()) >= 0.0 and float(out.pixels.max()) <= 1.0

    def test_checkpoint_round_trip_translation_bit_identical(self, desk_checkpoint, tiny_corpus, tmp_path):
        from shapes2toon.gan import save_checkpoint

        pair = tiny_corpus.load_pair(tiny_corpus.ids[1])
        gen, disc, _ = load_checkpoint(desk_checkpoint.checkpoint_dir)
        before = translate(gen, pair.source, dropout_seed=6)
        save_checkpoint(tmp_path / "resaved", gen, disc, step=0, seed=0)
        gen2, _, _ = load_checkpoint(tmp_path / "resaved")
        after = translate(gen2, pair.source, dropout_seed=6)
        assert np.array_equal(before.pixels, after.pixels)

    def test_fresh_random_init_is_valid_image(self):
        cfg = TrainConfig(seed=1, image_size=64, ng=4, nd=4)
        gen, _ = build_models(cfg)
        src = RasterImage(np.ones((64, 64, 3), dtype=np.float32))
        out = translate(gen, src, dropout_seed=0)
        assert np.isfinite(out.pixels).all()
        assert 0.0 <= float(out.pixels.min()) and float(out.pixels.max()) <= 1.0

    def test_letterbox_non_square(self):
        img = RasterImage(np.zeros((32, 64, 3), dtype=np.float32))
        boxed = letterbox(img, 64)
        assert (boxed.width, boxed.height) == (64, 64)
        # white padding above and below the squeezed band
        assert float(boxed.pixels[0].min()) == 1.0
        assert float(boxed.pixels[32].max()) == 0.0
