#include <doctest.h>

#include <random>

#include "soq/witness.hpp"

using namespace soq;

namespace {

Mat mat2(const FiniteField& F, std::vector<std::vector<long>> rows) {
    std::vector<Vec> r;
    for (auto& row : rows) {
        Vec v;
        for (long x : row) v.push_back(F.from_int(x));
        r.push_back(std::move(v));
    }
    return Mat::from_rows(F, r);
}

Mat block_diag(const Mat& a, const Mat& b) {
    const FiniteField& F = a.field();
    Mat m(F, a.rows() + b.rows(), a.rows() + b.rows());
    for (unsigned i = 0; i < a.rows(); ++i)
        for (unsigned j = 0; j < a.rows(); ++j) m.set(i, j, a.at(i, j));
    for (unsigned i = 0; i < b.rows(); ++i)
        for (unsigned j = 0; j < b.rows(); ++j)
            m.set(a.rows() + i, a.rows() + j, b.at(i, j));
    return m;
}

void check_paired_conditions(const OrthMap& phi, const PairedBasis& pb) {
    const QuadSpace& sp = phi.space();
    const unsigned n = sp.dim();
    CHECK(cyclic_space(phi.mat(), pb.x).dim() == pb.m);
    CHECK(cyclic_space(phi.mat(), pb.z).dim() == pb.m);
    CHECK(cyclic_space(phi.mat(), pb.x).sum(cyclic_space(phi.mat(), pb.z)).dim() == n);
    CHECK(sp.eval_q(pb.x) == sp.eval_q(pb.z));
    Vec xk = pb.x, zk = pb.z, znext = phi.apply(pb.z);
    for (unsigned k = 1; k <= n; ++k) {
        xk = phi.apply(xk);
        zk = phi.apply(zk);
        znext = phi.apply(znext);
        CHECK(sp.eval_f(pb.x, xk) == sp.eval_f(pb.z, zk));
        CHECK(sp.eval_f(xk, pb.z) == sp.eval_f(pb.x, znext));
    }
}

} // namespace

TEST_SUITE_BEGIN("witness");

TEST_CASE("paired basis on the hyperbolic plane") {
    auto F2 = FiniteField::prime_field(2);
    QuadSpace h = QuadSpace::hyperbolic(F2, 1);
    OrthMap id(h, Mat::identity(F2, 2));
    PairedBasis pb = paired_basis_type1o(id);
    CHECK(pb.x == Vec{1, 0});
    CHECK(pb.z == Vec{0, 1});
    CHECK(h.eval_q(pb.x) == 0);
    CHECK(h.eval_q(pb.z) == 0);
    check_paired_conditions(id, pb);
}

TEST_CASE("paired basis on the dimension-6 type-1o fixtures") {
    for (unsigned q : {2u, 4u}) {
        auto F = FiniteField::of_order(q);
        OrthMap phi = make_type1_fixture(F, 1, false);
        PairedBasis pb = paired_basis_type1o(phi);
        CHECK(pb.m == 3);
        check_paired_conditions(phi, pb);
    }
}

TEST_CASE("paired basis rejects type-1e and odd characteristic") {
    auto F2 = FiniteField::prime_field(2);
    CHECK_THROWS_AS(paired_basis_type1o(make_type1_fixture(F2, 1, true)),
                    DomainError);
    auto F3 = FiniteField::prime_field(3);
    QuadSpace h3 = QuadSpace::hyperbolic(F3, 1);
    CHECK_THROWS_AS(paired_basis_type1o(OrthMap(h3, Mat::identity(F3, 2))),
                    DomainError);
}

TEST_CASE("square root of the identity on the hyperbolic plane is the swap") {
    auto F2 = FiniteField::prime_field(2);
    QuadSpace h = QuadSpace::hyperbolic(F2, 1);
    OrthMap id(h, Mat::identity(F2, 2));
    OrthMap psi = square_root_type1o(id);
    CHECK(psi.mat() == mat2(F2, {{0, 1}, {1, 0}}));
    CHECK((psi.mat() * psi.mat()).is_identity());
    CHECK_FALSE(psi.is_special());
}

TEST_CASE("square roots of the dimension-6 fixtures") {
    for (unsigned q : {2u, 4u}) {
        auto F = FiniteField::of_order(q);
        OrthMap phi = make_type1_fixture(F, 1, false);
        OrthMap psi = square_root_type1o(phi);
        CHECK(psi.mat() * psi.mat() == phi.mat());
        CHECK_FALSE(psi.is_special());
        CHECK(psi.is_unipotent());
        CHECK(psi.min_poly() == Poly::from_ints(F, {1, 1}).pow(6));
    }
}

TEST_CASE("square-root dichotomy: type 1e has none") {
    auto F2 = FiniteField::prime_field(2);
    OrthMap t1e = make_type1_fixture(F2, 1, true);
    CHECK_THROWS_AS(square_root_type1o(t1e), NoSquareRoot);
    // decomposable input: domain error
    QuadSpace hh = QuadSpace::hyperbolic(F2, 2);
    Mat swap2(F2, 4, 4);
    swap2.set(0, 2, 1);
    swap2.set(2, 0, 1);
    swap2.set(1, 3, 1);
    swap2.set(3, 1, 1);
    CHECK_THROWS_AS(square_root_type1o(OrthMap(hh, swap2)), DomainError);
}

TEST_CASE("inverting involutions: identity on H") {
    auto F2 = FiniteField::prime_field(2);
    QuadSpace h = QuadSpace::hyperbolic(F2, 1);
    OrthMap id(h, Mat::identity(F2, 2));
    OrthMap s = inverting_involution(id, FixDim::Half);
    CHECK(s.mat() == mat2(F2, {{0, 1}, {1, 0}}));
    CHECK(s.fix_space().dim() == 1);
    OrthMap s2 = inverting_involution(id, FixDim::HalfPlusOne);
    CHECK(s2.fix_space().dim() == 2);  // the identity itself
}

TEST_CASE("inverting involutions: cyclic unipotent dim 4, both fix dimensions") {
    auto F2 = FiniteField::prime_field(2);
    OrthMap phi = make_cyclic_unipotent(F2, 2);
    for (FixDim want : {FixDim::Half, FixDim::HalfPlusOne}) {
        OrthMap s = inverting_involution(phi, want);
        CHECK(s.is_involution());
        CHECK(s.mat() * phi.mat() * s.mat() == phi.inverse().mat());
        CHECK(s.fix_space().dim() == (want == FixDim::Half ? 2u : 3u));
    }
}

TEST_CASE("inverting involutions: type 3 fixfree cyclic") {
    auto F5 = FiniteField::prime_field(5);
    QuadSpace h5 = QuadSpace::hyperbolic(F5, 1);
    OrthMap phi(h5, mat2(F5, {{2, 0}, {0, 3}}));
    OrthMap s = inverting_involution(phi, FixDim::Half);
    CHECK(s.fix_space().dim() == 1);
    CHECK(s.mat() * phi.mat() * s.mat() == phi.inverse().mat());
    // Fix(phi) = Fix(sigma) ^ Fix(phi sigma)
    Subspace meet = s.fix_space().intersect(
        OrthMap(h5, phi.mat() * s.mat()).fix_space());
    CHECK(meet.dim() == 0);
    CHECK(phi.fix_space().dim() == 0);
    CHECK_THROWS_AS(inverting_involution(phi, FixDim::HalfPlusOne), DomainError);
}

TEST_CASE("inverting involutions: type 1o dimension 6") {
    auto F2 = FiniteField::prime_field(2);
    OrthMap phi = make_type1_fixture(F2, 1, false);
    OrthMap s = inverting_involution(phi, FixDim::Half);
    CHECK(s.fix_space().dim() == 3);
    CHECK(s.mat() * phi.mat() * s.mat() == phi.inverse().mat());
    OrthMap s2 = inverting_involution(phi, FixDim::HalfPlusOne);
    CHECK(s2.fix_space().dim() == 4);
    CHECK(s2.mat() * phi.mat() * s2.mat() == phi.inverse().mat());
}

TEST_CASE("inverting involutions: type 1e via the cyclic cover") {
    for (unsigned q : {2u, 4u}) {
        auto F = FiniteField::of_order(q);
        OrthMap phi = make_type1_fixture(F, 1, true);
        OrthMap s = inverting_involution(phi, FixDim::Half);
        CHECK(s.fix_space().dim() == 2);
        CHECK(s.mat() * phi.mat() * s.mat() == phi.inverse().mat());
        CHECK_THROWS_AS(inverting_involution(phi, FixDim::HalfPlusOne), DomainError);
    }
}

TEST_CASE("involution pairs: negative identity over GF(3)") {
    auto F3 = FiniteField::prime_field(3);
    QuadSpace h3 = QuadSpace::hyperbolic(F3, 1);
    OrthMap neg(h3, mat2(F3, {{-1, 0}, {0, -1}}));
    REQUIRE(neg.is_special());
    auto pair = involution_pair_so(neg);
    REQUIRE(pair.has_value());
    CHECK(pair->first.mat() == neg.mat());
    CHECK(pair->second.mat().is_identity());
}

TEST_CASE("involution pairs: order-3 rotation over GF(4) has none") {
    auto F4 = FiniteField::make(2, 2);
    QuadSpace h4 = QuadSpace::hyperbolic(F4, 1);
    Fe w = F4.from_digits({0, 1});
    Mat rot(F4, 2, 2);
    rot.set(0, 0, w);
    rot.set(1, 1, F4.inv(w));
    OrthMap phi(h4, rot);
    REQUIRE(phi.is_special());
    CHECK_FALSE(involution_pair_so(phi).has_value());
    WitnessReport rep = is_bireflectional_so(phi);
    CHECK_FALSE(rep.bireflectional);
    CHECK_FALSE(rep.reversible);
    CHECK(rep.reason == "no-type1o-or-cyclic-unipotent-summand");
}

TEST_CASE("involution pairs across a dim-4 space in characteristic 2") {
    auto F2 = FiniteField::prime_field(2);
    QuadSpace hh = QuadSpace::hyperbolic(F2, 2);
    std::mt19937_64 rng(5);
    std::vector<Vec> aniso;
    for (unsigned idx = 1; idx < 16; ++idx) {
        Vec v = vec_from_index(F2, 4, idx);
        if (hh.eval_q(v) != 0) aniso.push_back(v);
    }
    int tested = 0;
    for (int iter = 0; iter < 40; ++iter) {
        Mat prod = Mat::identity(F2, 4);
        unsigned len = rng() % 5;
        for (unsigned i = 0; i < len; ++i)
            prod = prod * reflection(hh, aniso[rng() % aniso.size()]).mat();
        OrthMap phi(hh, prod);
        if (!phi.is_special()) continue;
        ++tested;
        auto pair = involution_pair_so(phi);
        REQUIRE(pair.has_value());
        auto& [rho, sigma] = *pair;
        CHECK(rho.is_involution());
        CHECK(sigma.is_involution());
        CHECK(rho.mat() * sigma.mat() == phi.mat());
        CHECK(rho.is_special());
        CHECK(sigma.is_special());
    }
    CHECK(tested > 5);
}

TEST_CASE("full-path element of the dim-6 hyperbolic GF(2) space is not bireflectional") {
    auto F2 = FiniteField::prime_field(2);
    QuadSpace sp = QuadSpace::hyperbolic(F2, 3);
    OrthMap psi = full_path_element(sp);
    REQUIRE(psi.is_special());
    REQUIRE(psi.fix_space().dim() == 0);
    WitnessReport rep = is_bireflectional_so(psi);
    CHECK_FALSE(rep.bireflectional);
    CHECK(rep.reason == "no-type1o-or-cyclic-unipotent-summand");
    CHECK_FALSE(is_reversible_so(psi));
}

TEST_CASE("type-1o summand makes a dim-6 special element bireflectional") {
    auto F2 = FiniteField::prime_field(2);
    // anisotropic plane (identity: type 1o) + a special dim-4 piece
    QuadSpace plane = QuadSpace::anisotropic_plane(F2);
    QuadSpace hh = QuadSpace::hyperbolic(F2, 2);
    QuadSpace sum = QuadSpace::orthogonal_sum(plane, hh);
    OrthMap g4 = full_path_element(hh);
    Mat m = block_diag(Mat::identity(F2, 2), g4.mat());
    OrthMap phi(sum, m);
    REQUIRE(phi.is_special());
    WitnessReport rep = is_bireflectional_so(phi);
    CHECK(rep.bireflectional);
    CHECK(rep.reason == "type1o-summand");
    REQUIRE(rep.pair.has_value());
    CHECK(rep.pair->first.mat() * rep.pair->second.mat() == phi.mat());
    CHECK(rep.pair->first.is_special());
    CHECK(rep.pair->second.is_special());
}

TEST_CASE("identity is bireflectional everywhere") {
    for (unsigned q : {2u, 3u, 4u, 5u}) {
        auto F = FiniteField::of_order(q);
        QuadSpace h = QuadSpace::hyperbolic(F, 1);
        WitnessReport rep = is_bireflectional_so(OrthMap(h, Mat::identity(F, 2)));
        CHECK(rep.bireflectional);
        REQUIRE(rep.pair.has_value());
    }
}

TEST_CASE("non-special inputs are rejected") {
    auto F2 = FiniteField::prime_field(2);
    QuadSpace h = QuadSpace::hyperbolic(F2, 1);
    OrthMap swp(h, mat2(F2, {{0, 1}, {1, 0}}));
    CHECK_THROWS_AS(is_bireflectional_so(swp), DomainError);
    CHECK_THROWS_AS(involution_pair_so(swp), DomainError);
}

TEST_CASE("group-level bireflectionality table") {
    auto F2 = FiniteField::prime_field(2);
    auto F3 = FiniteField::prime_field(3);
    auto F4 = FiniteField::make(2, 2);
    auto F5 = FiniteField::prime_field(5);

    CHECK(is_group_bireflectional(QuadSpace::hyperbolic(F2, 1)));
    CHECK(is_group_bireflectional(QuadSpace::hyperbolic(F3, 1)));
    CHECK_FALSE(is_group_bireflectional(QuadSpace::hyperbolic(F4, 1)));
    CHECK_FALSE(is_group_bireflectional(QuadSpace::hyperbolic(F5, 1)));
    CHECK_FALSE(is_group_bireflectional(QuadSpace::anisotropic_plane(F2)));
    CHECK_FALSE(is_group_bireflectional(QuadSpace::anisotropic_plane(F3)));

    for (unsigned q : {2u, 3u, 4u, 5u}) {
        auto F = FiniteField::of_order(q);
        CHECK(is_group_bireflectional(QuadSpace::hyperbolic(F, 2)));
        CHECK(is_group_bireflectional(QuadSpace::minus_type(F, 2)));
    }
    CHECK_FALSE(is_group_bireflectional(QuadSpace::hyperbolic(F2, 3)));
    CHECK_FALSE(is_group_bireflectional(QuadSpace::minus_type(F2, 3)));
    CHECK(is_group_bireflectional(QuadSpace::hyperbolic(F3, 3)));
    CHECK_FALSE(is_group_bireflectional(QuadSpace::minus_type(F3, 3)));
}

TEST_SUITE_END();
