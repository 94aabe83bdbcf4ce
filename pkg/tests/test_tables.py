import io

import pytest

import kinpower as kp
from kinpower import errors
from kinpower.tables import FREQ_SUM_TOL


BASIC_CSV = (
    "subpop,locus,allele,freq\n"
    "a,L1,10,0.5\n"
    "a,L1,11,0.5\n"
)


class TestLoadFrequencyTable:
    def test_already_normalized_single_subpop(self):
        table = kp.load_frequency_table(BASIC_CSV, floor=1e-5)
        dist = table.freqs["a"]["L1"]
        assert dist == {"10": 0.5, "11": 0.5}
        assert table.n_subpops == 1 and table.n_loci == 1

    def test_floor_raises_and_renormalizes(self):
        csv = (
            "subpop,locus,allele,freq\n"
            "a,L1,10,0.999999\n"
            "a,L1,11,0.0\n"
        )
        table = kp.load_frequency_table(csv, floor=1e-5)
        dist = table.freqs["a"]["L1"]
        norm = 0.999999 + 1e-5
        assert dist["11"] == pytest.approx(1e-5 / norm)
        assert dist["10"] == pytest.approx(0.999999 / norm)
        assert abs(sum(dist.values()) - 1.0) < FREQ_SUM_TOL

    def test_union_support_floored_across_subpops(self):
        # allele 12 only typed in subpop b; it must get positive frequency in a
        csv = (
            "subpop,locus,allele,freq\n"
            "a,L1,10,0.5\n"
            "a,L1,11,0.5\n"
            "b,L1,10,0.3\n"
            "b,L1,11,0.3\n"
            "b,L1,12,0.4\n"
        )
        table = kp.load_frequency_table(csv, floor=1e-5)
        assert table.freqs["a"]["L1"]["12"] > 0.0
        assert table.alleles("L1") == ("10", "11", "12")

    def test_thai_shaped_config(self):
        table = kp.synth_frequency_table(
            n_subpops=4, n_loci=15, n_alleles=8, divergence=0.2, seed=1,
            proportions=[0.1108, 0.3695, 0.3538, 0.1659])
        assert table.n_subpops == 4
        assert table.n_loci == 15
        assert sum(table.proportions) == pytest.approx(1.0, abs=1e-12)

    def test_proportions_renormalized_within_tolerance(self):
        meta = kp.TableMeta(subpops=["a"], proportions=[0.99995])
        table = kp.load_frequency_table(BASIC_CSV, meta=meta)
        assert table.proportions == (1.0,)

    def test_proportions_out_of_tolerance(self):
        meta = kp.TableMeta(subpops=["a"], proportions=[0.9])
        with pytest.raises(errors.ProportionSumOutOfTolerance):
            kp.load_frequency_table(BASIC_CSV, meta=meta)

    def test_duplicate_allele(self):
        csv = BASIC_CSV + "a,L1,10,0.1\n"
        with pytest.raises(errors.DuplicateAllele):
            kp.load_frequency_table(csv)

    def test_missing_locus_for_subpop(self):
        csv = BASIC_CSV + "b,L2,10,1.0\n"
        meta = kp.TableMeta(subpops=["a", "b"], proportions=[0.5, 0.5])
        with pytest.raises(errors.MissingLocusForSubpop):
            kp.load_frequency_table(csv, meta=meta)

    def test_negative_frequency(self):
        csv = "subpop,locus,allele,freq\na,L1,10,-0.5\na,L1,11,1.5\n"
        with pytest.raises(errors.NonPositiveFrequency):
            kp.load_frequency_table(csv)

    def test_malformed_row(self):
        with pytest.raises(errors.MalformedRow):
            kp.load_frequency_table("subpop,locus,allele,freq\na,L1,10\n")

    def test_bad_header(self):
        with pytest.raises(errors.MalformedRow):
            kp.load_frequency_table("locus,allele,freq\nL1,10,1.0\n")

    def test_round_trip(self, two_subpop_table):
        dumped = kp.dump_frequency_table(two_subpop_table)
        meta = kp.load_table_meta(kp.dump_table_meta(two_subpop_table))
        reloaded = kp.load_frequency_table(dumped, meta=meta)
        assert reloaded == two_subpop_table
        assert kp.dump_frequency_table(reloaded) == dumped


class TestMetadata:
    def test_parse(self):
        text = (
            "# comment\n"
            "subpops = a, b\n"
            "proportions = 0.25, 0.75\n"
            "sample_sizes = 10, 30\n"
            "panel = L1, L2\n"
            "floor = 1e-6\n"
        )
        meta = kp.load_table_meta(text)
        assert meta.subpops == ["a", "b"]
        assert meta.proportions == [0.25, 0.75]
        assert meta.sample_sizes == [10, 30]
        assert meta.panel == ["L1", "L2"]
        assert meta.floor == 1e-6

    def test_bad_line(self):
        with pytest.raises(errors.MalformedRow):
            kp.load_table_meta("subpops a, b\n")


class TestLocalAverage:
    def test_two_subpop_mean(self):
        csv = (
            "subpop,locus,allele,freq\n"
            "a,L1,A,0.2\na,L1,B,0.8\n"
            "b,L1,A,0.4\nb,L1,B,0.6\n"
        )
        meta = kp.TableMeta(subpops=["a", "b"], proportions=[0.5, 0.5])
        table = kp.load_frequency_table(csv, meta=meta)
        local = kp.local_average(table).freqs["local"]["L1"]
        assert local["A"] == pytest.approx(0.3)
        assert local["B"] == pytest.approx(0.7)

    def test_single_subpop_identity(self, one_locus_table):
        local = kp.local_average(one_locus_table)
        assert local.freqs["local"] == dict(one_locus_table.freqs["pop"])

    def test_three_subpop_dot_product(self):
        rows = ["subpop,locus,allele,freq"]
        for name, fa in zip("abc", (0.1, 0.2, 0.4)):
            rows += [f"{name},L1,A,{fa}", f"{name},L1,B,{1 - fa}"]
        meta = kp.TableMeta(subpops=list("abc"), proportions=[0.2, 0.3, 0.5])
        table = kp.load_frequency_table("\n".join(rows) + "\n", meta=meta)
        local = kp.local_average(table).freqs["local"]["L1"]
        assert local["A"] == pytest.approx(0.28)

    def test_degenerate_proportions(self, two_subpop_table):
        subpops = (
            kp.Subpopulation("a", 1.0 - 1e-12),
            kp.Subpopulation("b", 1e-12),
        )
        table = kp.FrequencyTable(
            panel=two_subpop_table.panel, subpops=subpops,
            freqs=two_subpop_table.freqs, floor=two_subpop_table.floor)
        local = kp.local_average(table)
        for locus in table.panel:
            for allele, f in table.freqs["a"][locus].items():
                assert local.freqs["local"][locus][allele] == pytest.approx(f, abs=1e-11)

    def test_sums_stay_normalized(self, synth_table):
        local = kp.local_average(synth_table)
        for locus in local.panel:
            assert sum(local.freqs["local"][locus].values()) \
                == pytest.approx(1.0, abs=FREQ_SUM_TOL)


class TestPooledFrequencies:
    def test_census_matches_local_average(self, two_subpop_table):
        pooled = kp.pooled_frequencies(two_subpop_table, "census")
        local = kp.local_average(two_subpop_table)
        for locus in two_subpop_table.panel:
            assert pooled.freqs["pooled"][locus] == pytest.approx(
                local.freqs["local"][locus])

    def test_equal_weights(self):
        csv = (
            "subpop,locus,allele,freq\n"
            "a,L1,A,0.1\na,L1,B,0.9\n"
            "b,L1,A,0.3\nb,L1,B,0.7\n"
        )
        meta = kp.TableMeta(subpops=["a", "b"], proportions=[0.9, 0.1])
        table = kp.load_frequency_table(csv, meta=meta)
        pooled = kp.pooled_frequencies(table, "equal")
        assert pooled.freqs["pooled"]["L1"]["A"] == pytest.approx(0.2)

    def test_sample_size_weights(self):
        csv = (
            "subpop,locus,allele,freq\n"
            "a,L1,A,0.1\na,L1,B,0.9\n"
            "b,L1,A,0.3\nb,L1,B,0.7\n"
        )
        meta = kp.TableMeta(subpops=["a", "b"], proportions=[0.5, 0.5],
                            sample_sizes=[100, 300])
        table = kp.load_frequency_table(csv, meta=meta)
        pooled = kp.pooled_frequencies(table, "samples")
        expected = (100 * 0.1 + 300 * 0.3) / 400
        assert pooled.freqs["pooled"]["L1"]["A"] == pytest.approx(expected)

    def test_missing_sample_sizes(self, two_subpop_table):
        with pytest.raises(errors.MissingSampleSizes):
            kp.pooled_frequencies(two_subpop_table, "samples")

    def test_auto_falls_back_to_equal(self, two_subpop_table):
        pooled = kp.pooled_frequencies(two_subpop_table, "auto")
        equal = kp.pooled_frequencies(two_subpop_table, "equal")
        assert pooled.freqs["pooled"] == equal.freqs["pooled"]


class TestProfiles:
    def test_load_profile(self):
        csv = "locus,allele1,allele2\nD3S1358,14,13\nTH01,9.3,9.3\n"
        profile = kp.load_profile_csv(csv)
        assert profile.genotypes[0].alleles == ("13", "14")  # canonical order
        assert profile.genotypes[1].is_homozygote
        assert profile.loci == ("D3S1358", "TH01")

    def test_duplicate_locus_rejected(self):
        csv = "locus,allele1,allele2\nL1,1,2\nL1,3,4\n"
        with pytest.raises(errors.MalformedRow):
            kp.load_profile_csv(csv)

    def test_round_trip(self):
        csv = "locus,allele1,allele2\nL1,1,2\nL2,3,3\n"
        profile = kp.load_profile_csv(csv)
        assert kp.load_profile_csv(kp.dump_profile_csv(profile)) == profile
