#pragma once

#include "ihall/generators.hpp"

#include <string>
#include <vector>

namespace ihall {

struct RelationInstance {
    std::string id;  // iDR1b, iDR2, iDR3a, iDR3b, iDR4, iDR5
    Vertex mu, nu;
    long m = 0, n = 0, k = 0, l = 0, k1 = 0, k2 = 0;
    std::string params() const;
};

struct VerifyRecord {
    std::string id;
    std::string params;
    std::string transport = "native";
    std::string status;    // holds | fails | skipped | consumed-by-bootstrap
    std::string residual;  // dump on failure
    double seconds = 0;
};

class Verifier {
public:
    explicit Verifier(GeneratorSet& g) : G_(&g) {}

    GeneratorSet& gens() { return *G_; }
    const Ctx& ctx() const { return G_->ctx(); }

    // residual LHS - RHS of one relation instance; zero means the relation holds
    HallElt relation_residual(const RelationInstance& inst, bool perturb = false);
    VerifyRecord check_relation(const RelationInstance& inst, bool perturb = false);

    // the default verification grids over all vertex pairs
    std::vector<RelationInstance> relation_grid(const std::string& filter) const;

    // named lemma suites; each returns one record per checked identity
    std::vector<VerifyRecord> lemma_suite(const std::string& which);

    // negative control: every template with a perturbed coefficient must fail
    std::vector<VerifyRecord> negative_control();

    // rewrite an instance over the rank-two perpendicular model (weight (2,1));
    // throws if an object lies outside the perpendicular subcategory
    struct PerpModel {
        Ctx target;
        int branch;
    };
    // membership test for the perpendicular sector of branch i
    bool perp_member(int i, const CohClass& m) const;
    // transport an element through the perpendicular dictionary
    HallElt perp_transport(int i, const PerpModel& pm, Engine& te, const HallElt& x) const;
    // check a Serre instance through the perpendicular reduction and report
    VerifyRecord check_serre_perp(const RelationInstance& inst);

private:
    std::vector<Vertex> vertices() const;
    GeneratorSet* G_;
};

}  // namespace ihall
