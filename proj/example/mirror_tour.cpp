// Walks through one instance of each correspondence on a random genus-2 modulus.

#include <abhms/abhms.hpp>

#include <iostream>

int main() {
    using namespace abhms;
    Rng rng(2024);
    const SiegelPoint tau = random_siegel(rng, 2);
    std::cout << "tau = " << to_json(tau).dump() << "\n";

    const ComplexVector z = ComplexVector::Zero(2);
    std::cout << "theta(tau, 0) = " << theta_eval(tau, z, ThetaChar::zero(2)) << "\n";

    auto rv = [&rng] {
        RealVector v(2);
        v << rng.uniform(), rng.uniform();
        return v;
    };
    const Brane l0 = Brane::finite(tau, 0, rv(), rv());
    const Brane l1 = Brane::finite(tau, 1, rv(), rv());
    const Brane l3 = Brane::finite(tau, 3, rv(), rv());

    // HF(l0, l3) against Ext of the mirror line bundles
    const auto dims = verify_dims(l0, l3);
    std::cout << "HF(l0,l3) = " << dims.params["hf"].dump() << ", Ext = " << dims.params["ext"].dump() << "\n";

    // a generator, its mirror section and the product identity
    const FloerElement p = floer_generator(l0, l1, {0, 0});
    std::cout << "phi1(p) = " << to_json(phi1(p)).dump() << "\n";
    const auto prod = verify_product(l0, l1, l3);
    std::cout << "mu2 vs section product: residual " << prod.max_residual << (prod.pass ? " (pass)" : " (FAIL)") << "\n";

    const auto ring = seidel_ring(tau, 3);
    std::cout << "ring structure constants up to degree 3: residual " << ring.report.max_residual << "\n";
    return prod.pass && dims.pass && ring.report.pass ? 0 : 1;
}
