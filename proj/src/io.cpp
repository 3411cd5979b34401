#include "l0fgl/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace l0fgl {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json optional_number(const std::optional<double>& v) { return v ? number_or_null(*v) : Json(nullptr); }

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        while (!field.empty() && field.front() == ' ') field.erase(field.begin());
        if (field.size() >= 2 && field.front() == '"' && field.back() == '"')
            field = field.substr(1, field.size() - 2);
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

int parse_int(const std::string& text, const std::string& where) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw InputError(where + ": '" + text + "' is not an integer");
    return v;
}

std::string csv_number(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return "";
    std::ostringstream os;
    os.precision(17);
    os << *v;
    return os.str();
}

Json summary_json(const std::optional<Summary>& s) {
    if (!s) return nullptr;
    return Json{{"mean", number_or_null(s->mean)},
                {"q25", number_or_null(s->q25)},
                {"median", number_or_null(s->median)},
                {"q75", number_or_null(s->q75)}};
}

Json grid_json(const std::vector<GridPoint>& grid) {
    Json out = Json::array();
    for (const auto& gp : grid) {
        Json folds = Json::array();
        for (double d : gp.fold_deviance) folds.push_back(number_or_null(d));
        out.push_back({{"lambda", gp.lambda},
                       {"mean_deviance", number_or_null(gp.mean_deviance)},
                       {"failed_folds", gp.failed_folds},
                       {"fold_deviance", folds}});
    }
    return out;
}

}  // namespace

ModelSchema schema_from_json(const Json& j) {
    const Json& list = j.is_object() && j.contains("factors") ? j.at("factors") : j;
    if (!list.is_array()) throw SchemaError("schema must be a list of {name, num_levels, scale}");
    std::vector<FactorSpec> factors;
    for (const auto& f : list) {
        if (!f.is_object() || !f.contains("name") || !f.contains("num_levels"))
            throw SchemaError("schema entries need 'name' and 'num_levels'");
        FactorSpec spec;
        spec.name = f.at("name").get<std::string>();
        spec.num_levels = f.at("num_levels").get<int>();
        spec.scale = f.contains("scale") ? parse_scale(f.at("scale").get<std::string>()) : Scale::nominal;
        factors.push_back(spec);
    }
    return ModelSchema(factors);
}

Json schema_to_json(const ModelSchema& schema) {
    Json out = Json::array();
    for (const auto& f : schema.factors())
        out.push_back({{"name", f.name}, {"num_levels", f.num_levels}, {"scale", to_string(f.scale)}});
    return out;
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw InputError(path + ": invalid JSON (" + e.what() + ")");
    }
}

ModelSchema read_schema(const std::string& path) {
    const Json j = read_json(path);
    try {
        return schema_from_json(j);
    } catch (const Json::exception& e) {
        throw InputError(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(path + ": " + e.what());
    }
}

Dataset read_dataset(const std::string& path, const ModelSchema& schema, const std::string& response) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty file");
    const auto header = split_csv_line(line);

    std::map<std::string, int> column;
    for (int c = 0; c < static_cast<int>(header.size()); ++c) column[header[c]] = c;
    auto find = [&](const std::string& name) {
        const auto it = column.find(name);
        if (it == column.end()) throw InputError(path + ": missing column '" + name + "'");
        return it->second;
    };
    std::vector<int> factor_cols;
    for (const auto& f : schema.factors()) factor_cols.push_back(find(f.name));
    const int y_col = find(response);

    std::vector<std::vector<int>> rows;
    std::vector<double> ys;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        const std::string where = path + ":" + std::to_string(line_no);
        if (fields.size() != header.size())
            throw InputError(where + ": expected " + std::to_string(header.size()) + " fields");
        std::vector<int> row;
        for (int c : factor_cols) row.push_back(parse_int(fields[c], where));
        rows.push_back(row);
        ys.push_back(parse_int(fields[y_col], where));
    }

    RowMajorMatrixXi levels(static_cast<int>(rows.size()), schema.num_factors());
    VectorXd y(static_cast<int>(ys.size()));
    for (int i = 0; i < levels.rows(); ++i) {
        for (int j = 0; j < schema.num_factors(); ++j) levels(i, j) = rows[i][j];
        y[i] = ys[i];
    }
    try {
        return encode(levels, schema, y);
    } catch (const std::invalid_argument& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_dataset(const std::string& path, const Dataset& data, const std::string& response) {
    std::ostringstream os;
    for (const auto& f : data.schema.factors()) os << f.name << ',';
    os << response << '\n';
    for (int i = 0; i < data.n(); ++i) {
        for (int j = 0; j < data.schema.num_factors(); ++j) os << data.levels(i, j) << ',';
        os << static_cast<int>(data.y[i]) << '\n';
    }
    write_text(path, os.str());
}

Json coef_to_json(const CoefVector& beta, const ModelSchema& schema) {
    Json flat = Json::array();
    for (int i = 0; i < beta.size(); ++i) flat.push_back(beta.flat()[i]);
    Json blocks = Json::object();
    for (int j = 0; j < schema.num_factors(); ++j) {
        Json b = Json::array();
        for (int k = 0; k < beta.block_size(j); ++k) b.push_back(beta.block(j)[k]);
        blocks[schema.factor(j).name] = b;
    }
    return Json{{"intercept", beta.intercept()}, {"beta", flat}, {"blocks", blocks}};
}

CoefVector coef_from_json(const Json& j, const ModelSchema& schema) {
    const Json* node = &j;
    if (node->is_object() && node->contains("final_fit")) node = &node->at("final_fit");
    if (node->is_object() && node->contains("beta")) node = &node->at("beta");
    if (!node->is_array()) throw InputError("coefficients must be an array or an object with 'beta'");
    if (static_cast<int>(node->size()) != schema.num_columns())
        throw DimensionError("expected " + std::to_string(schema.num_columns()) +
                             " coefficients (intercept first), got " + std::to_string(node->size()));
    VectorXd flat(schema.num_columns());
    for (int i = 0; i < flat.size(); ++i) flat[i] = node->at(i).get<double>();
    return CoefVector(schema, flat);
}

Json to_json(const FitResult& fit, const ModelSchema& schema) {
    Json out = coef_to_json(fit.beta, schema);
    out["converged"] = fit.converged;
    out["iterations"] = fit.iterations;
    out["objective"] = number_or_null(fit.objective);
    out["failed"] = fit.failed;
    out["failure_reason"] = fit.failure_reason;
    out["note"] = fit.note;
    return out;
}

Json to_json(const CvResult& cv, const ModelSchema& schema) {
    return Json{{"lambda1_opt", cv.lambda1_opt},
                {"lambda0_opt", cv.lambda0_opt},
                {"lambda_max", cv.lambda_max},
                {"cv_fits", cv.cv_fits},
                {"probe_fits", cv.probe_fits},
                {"monotonicity_violations", cv.monotonicity_violations},
                {"grid_lambda1", grid_json(cv.grid1)},
                {"grid_lambda0", grid_json(cv.grid0)},
                {"fold_assignments", cv.fold_assignments},
                {"final_fit", to_json(cv.final_fit, schema)}};
}

Json to_json(const EvalReport& r) {
    return Json{{"msec", number_or_null(r.msec)},
                {"pred_deviance", optional_number(r.pred_deviance)},
                {"fp_sel", optional_number(r.fp_sel)},
                {"fn_sel", optional_number(r.fn_sel)},
                {"fp_fus", optional_number(r.fp_fus)},
                {"fn_fus", optional_number(r.fn_fus)},
                {"os", r.os},
                {"ps", r.ps}};
}

Json to_json(const ReplicationReport& report) {
    Json methods = Json::array();
    for (const auto& m : report.methods) {
        methods.push_back({{"method", m.method.name()},
                           {"replications", m.replications},
                           {"fails", m.fails},
                           {"proportion_of_fails", m.proportion_of_fails},
                           {"msec", summary_json(m.msec)},
                           {"pred_deviance", summary_json(m.pred_deviance)},
                           {"fp_sel", optional_number(m.fp_sel)},
                           {"fn_sel", optional_number(m.fn_sel)},
                           {"fp_fus", optional_number(m.fp_fus)},
                           {"fn_fus", optional_number(m.fn_fus)},
                           {"os", optional_number(m.os)},
                           {"ps", optional_number(m.ps)}});
    }
    return Json{{"design", report.design},
                {"n", report.n},
                {"replications", report.replications},
                {"seed", report.seed},
                {"methods", methods}};
}

std::string replications_csv(const ReplicationReport& report) {
    std::ostringstream os;
    os << "method,replication,failed,failure_reason,lambda1,lambda0,msec,pred_deviance,fp_sel,fn_sel,"
          "fp_fus,fn_fus,os,ps\n";
    for (const auto& m : report.methods) {
        for (const auto& r : m.records) {
            std::string reason = r.failure_reason;
            for (char& ch : reason)
                if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
            os << m.method.name() << ',' << r.replication << ',' << (r.failed ? 1 : 0) << ',' << reason
               << ',' << csv_number(r.lambda1) << ',' << csv_number(r.lambda0) << ',';
            if (r.failed) {
                os << ",,,,,,,\n";
                continue;
            }
            os << csv_number(r.eval.msec) << ',' << csv_number(r.eval.pred_deviance) << ','
               << csv_number(r.eval.fp_sel) << ',' << csv_number(r.eval.fn_sel) << ','
               << csv_number(r.eval.fp_fus) << ',' << csv_number(r.eval.fn_fus) << ',' << r.eval.os
               << ',' << r.eval.ps << '\n';
        }
    }
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
    if (!out) throw InputError("failed writing " + path);
}

}  // namespace l0fgl
