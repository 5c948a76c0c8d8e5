#pragma once
// End-to-end patient representation: KG -> walks -> embeddings -> patient vectors.

#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "exprkg/domain_ingest.hpp"
#include "exprkg/embedder.hpp"
#include "exprkg/expression.hpp"
#include "exprkg/kg_builder.hpp"
#include "exprkg/patient_repr.hpp"
#include "exprkg/walker.hpp"

namespace exprkg {

enum class Representation { Direct, WeightedAverage };

/// Which entities walks start from.
enum class StartSet { Auto, PatientsAndGenes, Genes, Patients };

inline std::string_view to_string(StartSet s) noexcept {
    switch (s) {
    case StartSet::Auto: return "auto";
    case StartSet::PatientsAndGenes: return "patients-and-genes";
    case StartSet::Genes: return "genes";
    case StartSet::Patients: return "patients";
    }
    return "auto";
}

inline std::optional<StartSet> parse_start_set(std::string_view s) noexcept {
    for (auto v : {StartSet::Auto, StartSet::PatientsAndGenes, StartSet::Genes, StartSet::Patients})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

/// Patients need walks only for the direct strategy; genes always do.
inline StartSet resolve_start_set(StartSet s, Representation r) noexcept {
    if (s != StartSet::Auto) return s;
    return r == Representation::Direct ? StartSet::PatientsAndGenes : StartSet::Genes;
}

struct PipelineSettings {
    KgBuildConfig kg;
    WalkConfig walk;
    TrainConfig train;
    StartSet start_set = StartSet::Auto;
    unsigned workers = 1;
};

/// Start entities in a fixed order: patients (dataset order, sample order), then genes by first appearance.
inline std::vector<Term> start_entities(std::span<const ExpressionDataset> datasets, StartSet set,
                                        const Namespace& ns) {
    std::vector<Term> out;
    if (set == StartSet::PatientsAndGenes || set == StartSet::Patients)
        for (const auto& ds : datasets)
            for (const auto& s : ds.samples) out.emplace_back(ns.patient(ds.id, s.id));
    if (set == StartSet::PatientsAndGenes || set == StartSet::Genes) {
        std::unordered_set<std::string> seen;
        for (const auto& ds : datasets)
            for (const auto& g : ds.genes)
                if (seen.insert(g).second) out.emplace_back(ns.gene(g));
    }
    return out;
}

struct PipelineResult {
    KnowledgeGraph kg;
    WalkCorpus corpus;
    EmbeddingModel model;
    PatientMatrix patients;
};

inline PipelineResult run_pipeline(std::span<const ExpressionDataset> datasets, const DomainSources& domain,
                                   const IdMapping& mapping, const PipelineSettings& settings,
                                   Representation representation) {
    PipelineResult r;
    r.kg = assemble_kg(datasets, domain, mapping, settings.kg);
    const Namespace ns{settings.kg.namespace_prefix};
    auto starts = start_entities(datasets, resolve_start_set(settings.start_set, representation), ns);
    r.corpus = generate_walks(r.kg.graph, starts, settings.walk, settings.workers);
    TrainConfig tc = settings.train;
    tc.workers = settings.workers;
    r.model = train(r.corpus, tc);
    r.patients = representation == Representation::Direct ? direct_representation(r.model, datasets, ns)
                                                          : weighted_average_representation(r.model, datasets, ns);
    return r;
}

} // namespace exprkg
