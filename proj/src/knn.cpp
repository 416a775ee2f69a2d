#include "repliscope/knn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "repliscope/csv.hpp"
#include "repliscope/parallel.hpp"

namespace repliscope {

NeighborTable::NeighborTable(std::size_t query_count, std::size_t k, std::vector<Neighbor> entries)
    : query_count_(query_count), k_(k), entries_(std::move(entries)) {
    if (entries_.size() != query_count_ * k_) {
        throw InvalidInput("neighbor table entries do not match query_count x k");
    }
}

namespace {

constexpr std::size_t kQueryTile = 32;
constexpr std::size_t kRefTile = 128;
// Candidates kept beyond the requested depth so that near-ties reordered by
// rounding in the expansion are settled by the direct distance.
constexpr std::size_t kSlack = 4;

// Fixed four-way accumulation order; norms use the same routine so that
// identical rows cancel exactly in the expansion.
double dot(const float* a, const float* b, std::size_t n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += static_cast<double>(a[i]) * b[i];
        s1 += static_cast<double>(a[i + 1]) * b[i + 1];
        s2 += static_cast<double>(a[i + 2]) * b[i + 2];
        s3 += static_cast<double>(a[i + 3]) * b[i + 3];
    }
    for (; i < n; ++i) s0 += static_cast<double>(a[i]) * b[i];
    return (s0 + s1) + (s2 + s3);
}

double direct_distance(std::span<const float> a, std::span<const float> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<double> row_norms(const VectorDataset& ds) {
    std::vector<double> norms(ds.count());
    for (std::size_t i = 0; i < ds.count(); ++i) {
        const auto r = ds.row(i);
        norms[i] = dot(r.data(), r.data(), r.size());
    }
    return norms;
}

struct Candidate {
    double sq;
    std::size_t index;
};

// Bounded ascending list; equal keys keep arrival (= index) order.
class TopK {
public:
    explicit TopK(std::size_t capacity) : capacity_(capacity) { items_.reserve(capacity + 1); }

    void offer(double sq, std::size_t index) {
        if (items_.size() == capacity_ && !(sq < items_.back().sq)) return;
        auto pos = std::upper_bound(items_.begin(), items_.end(), sq,
                                    [](double v, const Candidate& c) { return v < c.sq; });
        items_.insert(pos, Candidate{sq, index});
        if (items_.size() > capacity_) items_.pop_back();
    }

    const std::vector<Candidate>& items() const noexcept { return items_; }

private:
    std::size_t capacity_;
    std::vector<Candidate> items_;
};

// Blocked scan of all (query, ref) pairs for the queries in [q_begin, q_end).
// Refs are visited in ascending index order for every query, independent of
// how queries are partitioned.
void scan_tile(const VectorDataset& queries, const VectorDataset& refs,
               std::span<const double> qnorm, std::span<const double> rnorm, std::size_t q_begin,
               std::size_t q_end, bool exclude_self, std::vector<TopK>& tops) {
    const std::size_t dim = queries.dim();
    std::vector<double> dots(kQueryTile * kRefTile);
    for (std::size_t r_begin = 0; r_begin < refs.count(); r_begin += kRefTile) {
        const std::size_t r_end = std::min(r_begin + kRefTile, refs.count());
        for (std::size_t q = q_begin; q < q_end; ++q) {
            const float* qrow = queries.row(q).data();
            double* out = &dots[(q - q_begin) * kRefTile];
            for (std::size_t r = r_begin; r < r_end; ++r) {
                out[r - r_begin] = dot(qrow, refs.row(r).data(), dim);
            }
        }
        for (std::size_t q = q_begin; q < q_end; ++q) {
            auto& top = tops[q - q_begin];
            const double* row_dots = &dots[(q - q_begin) * kRefTile];
            for (std::size_t r = r_begin; r < r_end; ++r) {
                if (exclude_self && r == q) continue;
                const double sq = std::max(0.0, qnorm[q] + rnorm[r] - 2.0 * row_dots[r - r_begin]);
                top.offer(sq, r);
            }
        }
    }
}

// Shared driver: per query, the `depth` nearest refs by direct distance.
std::vector<Neighbor> nearest(const VectorDataset& queries, const VectorDataset& refs,
                              std::size_t depth, bool exclude_self, const KnnOptions& opts) {
    const std::size_t available = refs.count() - (exclude_self ? 1 : 0);
    const std::size_t keep = std::min(depth + kSlack, available);
    const auto qnorm = row_norms(queries);
    const auto rnorm = exclude_self ? qnorm : row_norms(refs);

    std::vector<Neighbor> result(queries.count() * depth);
    const std::size_t n_tiles = (queries.count() + kQueryTile - 1) / kQueryTile;
    parallel_for(n_tiles, opts.threads, [&](std::size_t tile) {
        const std::size_t q_begin = tile * kQueryTile;
        const std::size_t q_end = std::min(q_begin + kQueryTile, queries.count());
        std::vector<TopK> tops(q_end - q_begin, TopK(keep));
        scan_tile(queries, refs, qnorm, rnorm, q_begin, q_end, exclude_self, tops);

        std::vector<Neighbor> refined;
        for (std::size_t q = q_begin; q < q_end; ++q) {
            refined.clear();
            for (const auto& c : tops[q - q_begin].items()) {
                refined.push_back({c.index, direct_distance(queries.row(q), refs.row(c.index))});
            }
            std::sort(refined.begin(), refined.end(), [](const Neighbor& a, const Neighbor& b) {
                return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
            });
            std::copy_n(refined.begin(), depth, result.begin() + q * depth);
        }
    });
    return result;
}

}  // namespace

MinDistanceResult min_distances(const VectorDataset& queries, const VectorDataset& refs,
                                const KnnOptions& opts) {
    if (queries.dim() != refs.dim()) {
        throw InvalidInput("dimension mismatch: queries have dim " + std::to_string(queries.dim()) +
                           ", references " + std::to_string(refs.dim()));
    }
    if (queries.space_tag() != refs.space_tag()) {
        throw InvalidInput("space tag mismatch: queries are " +
                           std::string(to_string(queries.space_tag())) + ", references " +
                           std::string(to_string(refs.space_tag())));
    }
    const auto found = nearest(queries, refs, 1, false, opts);
    MinDistanceResult result;
    result.distance.reserve(found.size());
    result.index.reserve(found.size());
    for (const auto& n : found) {
        result.distance.push_back(n.distance);
        result.index.push_back(n.index);
    }
    return result;
}

NeighborTable knn_table(const VectorDataset& ds, std::size_t k_max, bool exclude_self,
                        const KnnOptions& opts) {
    if (k_max == 0) throw InvalidInput("k_max must be >= 1");
    const std::size_t required = k_max + (exclude_self ? 1 : 0);
    if (ds.count() < required) {
        throw InvalidInput("k-NN table with k=" + std::to_string(k_max) + " needs at least " +
                           std::to_string(required) + " rows, dataset has " +
                           std::to_string(ds.count()));
    }
    return NeighborTable(ds.count(), k_max, nearest(ds, ds, k_max, exclude_self, opts));
}

void write_min_distance_csv(const MinDistanceResult& result, const VectorDataset& queries,
                            const VectorDataset& refs, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << std::setprecision(6);
    out << "query_id,ref_id,distance\n";
    for (std::size_t q = 0; q < result.size(); ++q) {
        out << csv_field(queries.label(q)) << ',' << csv_field(refs.label(result.index[q])) << ','
            << result.distance[q] << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace repliscope
